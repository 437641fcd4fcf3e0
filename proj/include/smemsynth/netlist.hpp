#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "smemsynth/baplus.hpp"
#include "smemsynth/memory_config.hpp"

namespace smemsynth {

enum class CellKind {
    BAPlus,
    Decoder,
    WordlineGate,
    TristateDriver,
    ColumnMux,
    OutputReg,
    PaIncrement,
    PaAlign,
    And,
    Or,
    Inv,
};

std::string to_string(CellKind k);
std::optional<CellKind> cell_kind_from_string(const std::string& s);

enum class PinDir { In, Out };

// A named pin of a cell kind, with its width under the cell's params.
struct PinSpec {
    std::string name;
    PinDir dir = PinDir::In;
    int width = 1;
};

struct Cell {
    std::string name;
    std::string scope; // hierarchy node; empty for the top level
    CellKind kind = CellKind::And;
    std::map<std::string, std::int64_t> params;

    // Qualified name, unique across the netlist: "scope/name".
    std::string id() const { return scope.empty() ? name : scope + "/" + name; }
    std::int64_t param(const std::string& key) const;
    std::int64_t param_or(const std::string& key, std::int64_t fallback) const;

    bool operator==(const Cell&) const = default;
};

// Pin contract of each kind. Params by kind:
//   baplus_instance  B, W, masked          clk rwl[B] wwl[B] wd[W] (wm[W]) -> q[W] oe
//   decoder          in_w, lo, n, split     a[in_w] -> y[2^n] | y0..y{2^n-1}
//   wordline_gate    B, sels                lines[B] en s0.. -> wl[B]
//   tristate_driver  width                  d en -> y (shared net)
//   column_mux       dir=0 (read)  ways, inputs, in_w, out_w       d0.. sel -> y
//                    dir=1 (write) ways, inputs, in_w, out_w, sel_w, sel_lo
//                                                                   d sel -> wd0.. wm0..
//   output_reg       in_w, lo, width, en    clk d[in_w] (en) -> q[width]
//   pa_increment     mode=0 (one-hot) m n a b p q xgroup          xl yl x y -> xo0.. yo0.. hit
//                    mode=1 (binary)  m n a b p q                 x y -> addr hit
//   pa_align         m n a b pb clamp                             d{p}_{q}.. x y -> pix{i}_{j}..
//   and / or         n                      i0.. -> y
//   inv                                     a -> y
// Zero-width pins are omitted.
std::vector<PinSpec> cell_pins(const Cell& cell);

struct PinRef {
    std::string cell; // qualified cell id
    std::string pin;

    bool operator==(const PinRef&) const = default;
};

struct Net {
    std::string name;
    int width = 1;
    std::vector<PinRef> drivers;
    std::vector<PinRef> sinks;

    bool operator==(const Net&) const = default;
};

struct Port {
    std::string name; // the port's net has the same name
    PinDir dir = PinDir::In;
    int width = 1;

    bool operator==(const Port&) const = default;
};

struct Scope {
    std::string name;
    std::string parent; // empty for children of the top level

    bool operator==(const Scope&) const = default;
};

// Hierarchical structural netlist. Immutable once built.
struct NetlistIR {
    std::map<std::string, std::string> attrs;
    std::vector<Scope> scopes;
    std::vector<Port> ports;
    std::vector<Cell> cells;
    std::vector<Net> nets;

    const Cell* find_cell(const std::string& id) const;
    const Net* find_net(const std::string& name) const;
    const Port* find_port(const std::string& name) const;
    std::size_t count(CellKind k) const;
    std::string attr(const std::string& key) const; // "" when absent

    bool operator==(const NetlistIR& o) const {
        return attrs == o.attrs && scopes == o.scopes && ports == o.ports && cells == o.cells && nets == o.nets;
    }
};

// Incremental construction helper used by the generators.
class NetlistBuilder {
  public:
    void attr(const std::string& key, const std::string& value) { ir_.attrs[key] = value; }
    void scope(const std::string& name, const std::string& parent);
    void port(const std::string& name, PinDir dir, int width);
    // Declares a net; redeclaring with the same width is a no-op.
    const std::string& net(const std::string& name, int width);
    // Adds a cell and connects pins to nets: {pin, net}.
    std::string cell(const std::string& scope, const std::string& name, CellKind kind,
                     std::map<std::string, std::int64_t> params,
                     const std::vector<std::pair<std::string, std::string>>& conns);

    // Finishes the netlist: cells sorted by id, nets and scopes by name.
    NetlistIR take();

  private:
    NetlistIR ir_;
    std::unordered_map<std::string, std::size_t> net_index_;
};

// Structural well-formedness. Empty iff every invariant holds: every non-port
// net has a driver and a sink; multiple drivers only when all are
// tristate_driver outputs; unique names; acyclic hierarchy; every pin of every
// cell connected exactly once with matching width and direction.
std::vector<std::string> check_wellformed(const NetlistIR& ir);

// 1R-1W SRAM for `cfg`. Ports: clk, re, raddr, we, waddr, wdata, rdata.
// Throws ConstraintError for an invalid cfg, LookupError for an unknown variant.
NetlistIR generate_sram(const MemoryConfig& cfg, const Library& lib);

// Embeds a 1R-1W SRAM under `scope`; `port_nets` maps each SRAM port name to
// an existing net of the enclosing design.
void append_sram(NetlistBuilder& b, const MemoryConfig& cfg, const BAPlusMacro& macro, const std::string& scope,
                 const std::map<std::string, std::string>& port_nets);

// Native line-oriented text format:
//   attr <key> <value>
//   scope <name> <parent|->
//   port <name> <in|out> <width>
//   cell <name> <kind> [scope=<scope>] key=val...
//   net <name> <width>
//   conn <net> <cell-id>.<pin> <drive|sink>
// with '#' comments. Cells are written sorted by id, nets by name.
std::string netlist_to_text(const NetlistIR& ir);
NetlistIR netlist_from_text(const std::string& text, const std::string& origin = "<string>");
void save_netlist(const NetlistIR& ir, const std::string& path);
NetlistIR load_netlist(const std::string& path);

// Fully elaborated Verilog-2001: one behavioral module per distinct leaf
// cell shape plus the top module; instances sorted by name.
std::string emit_verilog(const NetlistIR& ir);
void emit_hdl(const NetlistIR& ir, const std::string& path);

// Identifier used for a net or cell in emitted Verilog.
std::string verilog_ident(const std::string& name);

} // namespace smemsynth
