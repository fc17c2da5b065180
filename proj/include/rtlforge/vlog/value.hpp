#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtlforge::vlog {

// Four-state logic vector. Per bit, planes (a,b) encode:
//   (0,0)=0  (1,0)=1  (0,1)=z  (1,1)=x
// Bit 0 is the LSB. Bits above `width` are kept zero in both planes.
class Value {
public:
    enum class Bit : std::uint8_t { Zero = 0, One = 1, Z = 2, X = 3 };
    enum class Truth { False, True, Unknown };

    Value() : Value(1) {}
    explicit Value(std::uint32_t width, bool is_signed = false);

    static Value zeros(std::uint32_t width) { return Value(width); }
    static Value filled(std::uint32_t width, Bit b);
    static Value all_x(std::uint32_t width) { return filled(width, Bit::X); }
    static Value from_uint(std::uint64_t v, std::uint32_t width);
    static Value from_int(std::int64_t v, std::uint32_t width);
    // Verilog string literal: 8 bits per char, first char most significant.
    static Value from_chars(std::string_view chars);
    // Sized/based/plain numeric literal text, underscores allowed.
    static std::optional<Value> parse_literal(std::string_view text);

    std::uint32_t width() const { return width_; }
    bool is_signed() const { return signed_; }
    Value as_signed(bool s) const {
        Value v = *this;
        v.signed_ = s;
        return v;
    }

    Bit bit(std::uint32_t i) const;
    void set_bit(std::uint32_t i, Bit b);

    bool has_unknown() const;            // any x or z bit
    bool is_all_x() const;
    Truth truth() const;                 // 1 if any bit is 1, else 0 unless unknowns present

    // Unknown bits read as 0; check has_unknown() first where it matters.
    std::uint64_t to_uint64() const;
    std::int64_t to_int64() const;

    // Width change with Verilog extension rules: signed values replicate the
    // MSB (including x/z), unsigned zero-extend.
    Value resized(std::uint32_t new_width) const;

    // Part select starting at LSB index `lo`; out-of-range bits read x.
    Value select(std::int64_t lo, std::uint32_t count) const;
    // Writes src into bits [lo, lo+src.width); out-of-range bits dropped.
    void write(std::int64_t lo, const Value& src);

    bool identical(const Value& other) const;  // exact 4-state compare (=== with width check)

    std::string fmt_bin() const;
    std::string fmt_oct() const;
    std::string fmt_hex() const;
    std::string fmt_dec() const;

    friend Value bit_not(const Value& a);
    friend Value bit_and(const Value& a, const Value& b);
    friend Value bit_or(const Value& a, const Value& b);
    friend Value bit_xor(const Value& a, const Value& b);
    friend Value bit_xnor(const Value& a, const Value& b);

    friend Value arith_add(const Value& a, const Value& b);
    friend Value arith_sub(const Value& a, const Value& b);
    friend Value arith_mul(const Value& a, const Value& b);
    friend Value arith_div(const Value& a, const Value& b);
    friend Value arith_mod(const Value& a, const Value& b);
    friend Value arith_pow(const Value& a, const Value& b);
    friend Value arith_neg(const Value& a);

    friend Value shift_left(const Value& a, const Value& amount);
    friend Value shift_right_logical(const Value& a, const Value& amount);
    friend Value shift_right_arith(const Value& a, const Value& amount);

    // 1-bit results, x on unknown operands (except case equality).
    friend Value logic_eq(const Value& a, const Value& b);
    friend Value logic_neq(const Value& a, const Value& b);
    friend Value logic_lt(const Value& a, const Value& b);
    friend Value logic_le(const Value& a, const Value& b);
    friend Value logic_gt(const Value& a, const Value& b);
    friend Value logic_ge(const Value& a, const Value& b);
    friend bool case_eq(const Value& a, const Value& b);
    friend bool casez_match(const Value& subject, const Value& label);
    friend bool casex_match(const Value& subject, const Value& label);

    Value reduce_and() const;
    Value reduce_or() const;
    Value reduce_xor() const;

    static Value from_truth(Truth t);
    static Value concat(const std::vector<Value>& parts);  // parts[0] is most significant

private:
    std::uint32_t width_;
    bool signed_ = false;
    std::vector<std::uint64_t> a_;  // value plane
    std::vector<std::uint64_t> b_;  // x/z plane

    std::size_t words() const { return a_.size(); }
    void normalize();  // clear bits above width
    friend std::pair<Value, Value> extend_pair(const Value& a, const Value& b);
};

}  // namespace rtlforge::vlog
