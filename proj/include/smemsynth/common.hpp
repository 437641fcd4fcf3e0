#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smemsynth {

// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A value fell outside its permitted range (generator bounds, coordinates).
class BoundsError : public Error {
  public:
    using Error::Error;
};

// Malformed input file or document. `where` names the line or field.
class ParseError : public Error {
  public:
    ParseError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

  private:
    std::string where_;
};

// A name (variant, cell, net) could not be resolved.
class LookupError : public Error {
  public:
    using Error::Error;
};

// A configuration violates a structural constraint.
class ConstraintError : public Error {
  public:
    using Error::Error;
};

// Runtime failure during simulation (port conflict, bus contention, range).
class SimError : public Error {
  public:
    using Error::Error;
};

constexpr bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// floor(log2(v)) for v > 0.
constexpr int ilog2(std::uint64_t v) {
    int r = -1;
    while (v != 0) {
        v >>= 1;
        ++r;
    }
    return r;
}

// ceil(log2(v)) for v > 0.
constexpr int clog2(std::uint64_t v) {
    return v <= 1 ? 0 : ilog2(v - 1) + 1;
}

constexpr std::uint64_t width_mask(int width) {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

// Number of worker threads, capped by SMEMSYNTH_THREADS when set.
unsigned worker_threads();

} // namespace smemsynth
