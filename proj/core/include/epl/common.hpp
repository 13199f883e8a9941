#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epl {

// Error categories. The CLI maps these onto exit codes (usage -> 1, data -> 2).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Synaptic weight in fixed-point quanta. One base excitatory weight (we) is
/// kQuantaPerUnit quanta, so every plasticity step in use (0.05we, 0.2we and
/// the few-shot 0.00025we / 0.001we) is an exact integer and bounds such as
/// 0 and 1.25we are hit exactly.
class Weight {
public:
    static constexpr std::int64_t kQuantaPerUnit = 1'000'000;

    constexpr Weight() = default;
    static constexpr Weight from_quanta(std::int64_t q) { return Weight(q); }
    static Weight from_units(double units);

    constexpr std::int64_t quanta() const { return q_; }
    double units() const { return static_cast<double>(q_) / kQuantaPerUnit; }

    /// Multiply by a real factor, rounding to the nearest quantum.
    Weight scaled(double factor) const;

    constexpr Weight& operator+=(Weight o) { q_ += o.q_; return *this; }
    constexpr Weight& operator-=(Weight o) { q_ -= o.q_; return *this; }
    friend constexpr Weight operator+(Weight a, Weight b) { return Weight(a.q_ + b.q_); }
    friend constexpr Weight operator-(Weight a, Weight b) { return Weight(a.q_ - b.q_); }
    friend constexpr auto operator<=>(Weight, Weight) = default;

private:
    constexpr explicit Weight(std::int64_t q) : q_(q) {}
    std::int64_t q_ = 0;
};

} // namespace epl
