#include "rtlforge/vlog/value.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace rtlforge::vlog {

namespace {

std::size_t words_for(std::uint32_t width) { return (static_cast<std::size_t>(width) + 63) / 64; }

int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Value::Value(std::uint32_t width, bool is_signed)
    : width_(width == 0 ? 1 : width), signed_(is_signed) {
    a_.assign(words_for(width_), 0);
    b_.assign(words_for(width_), 0);
}

void Value::normalize() {
    std::uint32_t rem = width_ % 64;
    if (rem != 0) {
        std::uint64_t mask = (~0ull) >> (64 - rem);
        a_.back() &= mask;
        b_.back() &= mask;
    }
}

Value Value::filled(std::uint32_t width, Bit b) {
    Value v(width);
    for (std::uint32_t i = 0; i < v.width_; ++i) v.set_bit(i, b);
    return v;
}

Value Value::from_uint(std::uint64_t x, std::uint32_t width) {
    Value v(width);
    v.a_[0] = x;
    if (v.words() == 1 || width < 64) {
        // top bits masked by normalize
    }
    v.normalize();
    return v;
}

Value Value::from_int(std::int64_t x, std::uint32_t width) {
    Value v(width, true);
    std::uint64_t ux = static_cast<std::uint64_t>(x);
    for (std::size_t w = 0; w < v.words(); ++w) {
        v.a_[w] = ux;
        ux = x < 0 ? ~0ull : 0ull;
    }
    v.normalize();
    return v;
}

Value Value::from_chars(std::string_view chars) {
    if (chars.empty()) return Value::zeros(8);
    Value v(static_cast<std::uint32_t>(chars.size()) * 8);
    std::uint32_t pos = v.width_;
    for (char c : chars) {
        pos -= 8;
        for (int i = 0; i < 8; ++i) {
            if ((static_cast<unsigned char>(c) >> i) & 1) v.set_bit(pos + i, Bit::One);
        }
    }
    return v;
}

Value::Bit Value::bit(std::uint32_t i) const {
    if (i >= width_ && width_ > 0) return Bit::X;
    std::uint64_t av = (a_[i / 64] >> (i % 64)) & 1;
    std::uint64_t bv = (b_[i / 64] >> (i % 64)) & 1;
    if (bv) return av ? Bit::X : Bit::Z;
    return av ? Bit::One : Bit::Zero;
}

void Value::set_bit(std::uint32_t i, Bit b) {
    if (i >= width_) return;
    std::uint64_t mask = 1ull << (i % 64);
    std::size_t w = i / 64;
    std::uint64_t av = (b == Bit::One || b == Bit::X) ? mask : 0;
    std::uint64_t bv = (b == Bit::Z || b == Bit::X) ? mask : 0;
    a_[w] = (a_[w] & ~mask) | av;
    b_[w] = (b_[w] & ~mask) | bv;
}

bool Value::has_unknown() const {
    for (std::uint64_t w : b_)
        if (w) return true;
    return false;
}

bool Value::is_all_x() const {
    for (std::uint32_t i = 0; i < width_; ++i)
        if (bit(i) != Bit::X) return false;
    return true;
}

Value::Truth Value::truth() const {
    bool unknown = false;
    for (std::size_t w = 0; w < words(); ++w) {
        std::uint64_t one = a_[w] & ~b_[w];
        if (one) return Truth::True;
        if (b_[w]) unknown = true;
    }
    return unknown ? Truth::Unknown : Truth::False;
}

std::uint64_t Value::to_uint64() const {
    return a_[0] & ~b_[0];
}

std::int64_t Value::to_int64() const {
    std::uint64_t raw = to_uint64();
    if (signed_ && width_ < 64 && width_ > 0) {
        if ((raw >> (width_ - 1)) & 1) raw |= (~0ull) << width_;
    }
    return static_cast<std::int64_t>(raw);
}

Value Value::resized(std::uint32_t new_width) const {
    if (new_width == 0) new_width = 1;
    Value out(new_width, signed_);
    Bit fill = Bit::Zero;
    if (signed_ && width_ > 0) fill = bit(width_ - 1);
    for (std::uint32_t i = 0; i < new_width; ++i) {
        out.set_bit(i, i < width_ ? bit(i) : fill);
    }
    return out;
}

Value Value::select(std::int64_t lo, std::uint32_t count) const {
    Value out(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::int64_t src = lo + static_cast<std::int64_t>(i);
        if (src < 0 || src >= static_cast<std::int64_t>(width_)) {
            out.set_bit(i, Bit::X);
        } else {
            out.set_bit(i, bit(static_cast<std::uint32_t>(src)));
        }
    }
    return out;
}

void Value::write(std::int64_t lo, const Value& src) {
    for (std::uint32_t i = 0; i < src.width(); ++i) {
        std::int64_t dst = lo + static_cast<std::int64_t>(i);
        if (dst >= 0 && dst < static_cast<std::int64_t>(width_)) {
            set_bit(static_cast<std::uint32_t>(dst), src.bit(i));
        }
    }
}

bool Value::identical(const Value& other) const {
    if (width_ != other.width_) return false;
    return a_ == other.a_ && b_ == other.b_;
}

std::pair<Value, Value> extend_pair(const Value& x, const Value& y) {
    std::uint32_t w = std::max(x.width(), y.width());
    bool both_signed = x.is_signed() && y.is_signed();
    Value a = x.as_signed(x.is_signed() && both_signed).resized(w);
    Value b = y.as_signed(y.is_signed() && both_signed).resized(w);
    a = a.as_signed(both_signed);
    b = b.as_signed(both_signed);
    return {a, b};
}

Value bit_not(const Value& a) {
    Value out(a.width_);
    for (std::uint32_t i = 0; i < a.width_; ++i) {
        switch (a.bit(i)) {
            case Value::Bit::Zero: out.set_bit(i, Value::Bit::One); break;
            case Value::Bit::One: out.set_bit(i, Value::Bit::Zero); break;
            default: out.set_bit(i, Value::Bit::X);
        }
    }
    return out;
}

namespace {

Value::Bit and_bits(Value::Bit x, Value::Bit y) {
    if (x == Value::Bit::Zero || y == Value::Bit::Zero) return Value::Bit::Zero;
    if (x == Value::Bit::One && y == Value::Bit::One) return Value::Bit::One;
    return Value::Bit::X;
}

Value::Bit or_bits(Value::Bit x, Value::Bit y) {
    if (x == Value::Bit::One || y == Value::Bit::One) return Value::Bit::One;
    if (x == Value::Bit::Zero && y == Value::Bit::Zero) return Value::Bit::Zero;
    return Value::Bit::X;
}

Value::Bit xor_bits(Value::Bit x, Value::Bit y) {
    bool xu = x == Value::Bit::X || x == Value::Bit::Z;
    bool yu = y == Value::Bit::X || y == Value::Bit::Z;
    if (xu || yu) return Value::Bit::X;
    return (x == y) ? Value::Bit::Zero : Value::Bit::One;
}

Value bitwise(const Value& a, const Value& b, Value::Bit (*op)(Value::Bit, Value::Bit)) {
    auto [x, y] = extend_pair(a, b);
    Value out(x.width());
    for (std::uint32_t i = 0; i < x.width(); ++i) out.set_bit(i, op(x.bit(i), y.bit(i)));
    return out;
}

// Multiword two's-complement helpers on the value plane; callers must have
// ruled out unknown bits.
std::vector<std::uint64_t> plane_of(const Value& v, std::uint32_t width, bool sign_extend) {
    Value r = v.as_signed(sign_extend).resized(width);
    std::vector<std::uint64_t> out((static_cast<std::size_t>(width) + 63) / 64, 0);
    for (std::uint32_t i = 0; i < width; ++i) {
        if (r.bit(i) == Value::Bit::One) out[i / 64] |= 1ull << (i % 64);
    }
    return out;
}

Value value_from_plane(const std::vector<std::uint64_t>& plane, std::uint32_t width, bool is_signed) {
    Value out(width, is_signed);
    for (std::uint32_t i = 0; i < width; ++i) {
        std::size_t w = i / 64;
        if (w < plane.size() && ((plane[w] >> (i % 64)) & 1)) out.set_bit(i, Value::Bit::One);
    }
    return out;
}

}  // namespace

Value bit_and(const Value& a, const Value& b) { return bitwise(a, b, and_bits); }
Value bit_or(const Value& a, const Value& b) { return bitwise(a, b, or_bits); }
Value bit_xor(const Value& a, const Value& b) { return bitwise(a, b, xor_bits); }
Value bit_xnor(const Value& a, const Value& b) { return bit_not(bit_xor(a, b)); }

Value arith_add(const Value& a, const Value& b) {
    std::uint32_t w = std::max(a.width(), b.width());
    bool s = a.is_signed() && b.is_signed();
    if (a.has_unknown() || b.has_unknown()) return Value::all_x(w).as_signed(s);
    auto pa = plane_of(a, w, s);
    auto pb = plane_of(b, w, s);
    std::vector<std::uint64_t> sum(pa.size(), 0);
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        unsigned __int128 t = static_cast<unsigned __int128>(pa[i]) + pb[i] + carry;
        sum[i] = static_cast<std::uint64_t>(t);
        carry = t >> 64;
    }
    return value_from_plane(sum, w, s);
}

Value arith_neg(const Value& a) {
    if (a.has_unknown()) return Value::all_x(a.width()).as_signed(a.is_signed());
    Value flipped = bit_not(a);
    Value one = Value::from_uint(1, a.width());
    return arith_add(flipped, one).as_signed(a.is_signed());
}

Value arith_sub(const Value& a, const Value& b) {
    std::uint32_t w = std::max(a.width(), b.width());
    bool s = a.is_signed() && b.is_signed();
    if (a.has_unknown() || b.has_unknown()) return Value::all_x(w).as_signed(s);
    Value nb = arith_neg(b.resized(w));
    return arith_add(a.resized(w), nb).as_signed(s).resized(w);
}

Value arith_mul(const Value& a, const Value& b) {
    std::uint32_t w = std::max(a.width(), b.width());
    bool s = a.is_signed() && b.is_signed();
    if (a.has_unknown() || b.has_unknown()) return Value::all_x(w).as_signed(s);
    auto pa = plane_of(a, w, s);
    auto pb = plane_of(b, w, s);
    std::vector<std::uint64_t> prod(pa.size() + pb.size(), 0);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        unsigned __int128 carry = 0;
        for (std::size_t j = 0; j < pb.size() && i + j < prod.size(); ++j) {
            unsigned __int128 t = static_cast<unsigned __int128>(pa[i]) * pb[j] + prod[i + j] + carry;
            prod[i + j] = static_cast<std::uint64_t>(t);
            carry = t >> 64;
        }
    }
    prod.resize(pa.size());
    return value_from_plane(prod, w, s);
}

namespace {

bool fits_64(const Value& v) {
    // significant (value) bits confined to the low 64
    for (std::uint32_t i = 64; i < v.width(); ++i)
        if (v.bit(i) != Value::Bit::Zero) return false;
    return true;
}

}  // namespace

Value arith_div(const Value& a, const Value& b) {
    std::uint32_t w = std::max(a.width(), b.width());
    bool s = a.is_signed() && b.is_signed();
    if (a.has_unknown() || b.has_unknown()) return Value::all_x(w).as_signed(s);
    if (b.truth() == Value::Truth::False) return Value::all_x(w).as_signed(s);
    if (s) {
        std::int64_t q = a.resized(w).as_signed(true).to_int64() /
                         b.resized(w).as_signed(true).to_int64();
        return Value::from_int(q, w);
    }
    if (!fits_64(a) || !fits_64(b)) return Value::all_x(w).as_signed(s);
    return Value::from_uint(a.to_uint64() / b.to_uint64(), w);
}

Value arith_mod(const Value& a, const Value& b) {
    std::uint32_t w = std::max(a.width(), b.width());
    bool s = a.is_signed() && b.is_signed();
    if (a.has_unknown() || b.has_unknown()) return Value::all_x(w).as_signed(s);
    if (b.truth() == Value::Truth::False) return Value::all_x(w).as_signed(s);
    if (s) {
        std::int64_t q = a.resized(w).as_signed(true).to_int64() %
                         b.resized(w).as_signed(true).to_int64();
        return Value::from_int(q, w);
    }
    if (!fits_64(a) || !fits_64(b)) return Value::all_x(w).as_signed(s);
    return Value::from_uint(a.to_uint64() % b.to_uint64(), w);
}

Value arith_pow(const Value& a, const Value& b) {
    std::uint32_t w = a.width();
    if (a.has_unknown() || b.has_unknown() || !fits_64(b)) return Value::all_x(w);
    Value acc = Value::from_uint(1, w);
    std::uint64_t e = b.to_uint64();
    Value base = a;
    while (e) {
        if (e & 1) acc = arith_mul(acc, base).resized(w);
        base = arith_mul(base, base).resized(w);
        e >>= 1;
    }
    return acc;
}

Value shift_left(const Value& a, const Value& amount) {
    if (amount.has_unknown()) return Value::all_x(a.width()).as_signed(a.is_signed());
    std::uint64_t n = amount.to_uint64();
    Value out(a.width(), a.is_signed());
    if (n >= a.width()) return out;
    for (std::uint32_t i = static_cast<std::uint32_t>(n); i < a.width(); ++i)
        out.set_bit(i, a.bit(i - static_cast<std::uint32_t>(n)));
    return out;
}

Value shift_right_logical(const Value& a, const Value& amount) {
    if (amount.has_unknown()) return Value::all_x(a.width()).as_signed(a.is_signed());
    std::uint64_t n = amount.to_uint64();
    Value out(a.width(), a.is_signed());
    if (n >= a.width()) return out;
    for (std::uint32_t i = 0; i + static_cast<std::uint32_t>(n) < a.width(); ++i)
        out.set_bit(i, a.bit(i + static_cast<std::uint32_t>(n)));
    return out;
}

Value shift_right_arith(const Value& a, const Value& amount) {
    if (!a.is_signed()) return shift_right_logical(a, amount);
    if (amount.has_unknown()) return Value::all_x(a.width()).as_signed(true);
    std::uint64_t n = amount.to_uint64();
    Value out(a.width(), true);
    Value::Bit msb = a.width() ? a.bit(a.width() - 1) : Value::Bit::Zero;
    for (std::uint32_t i = 0; i < a.width(); ++i) {
        std::uint64_t src = i + n;
        out.set_bit(i, src < a.width() ? a.bit(static_cast<std::uint32_t>(src)) : msb);
    }
    return out;
}

Value Value::from_truth(Truth t) {
    Value v(1);
    if (t == Truth::True) v.set_bit(0, Bit::One);
    if (t == Truth::Unknown) v.set_bit(0, Bit::X);
    return v;
}

Value logic_eq(const Value& a, const Value& b) {
    auto [x, y] = extend_pair(a, b);
    if (x.has_unknown() || y.has_unknown()) return Value::from_truth(Value::Truth::Unknown);
    return Value::from_truth(x.identical(y) ? Value::Truth::True : Value::Truth::False);
}

Value logic_neq(const Value& a, const Value& b) {
    Value e = logic_eq(a, b);
    if (e.has_unknown()) return e;
    return Value::from_truth(e.truth() == Value::Truth::True ? Value::Truth::False
                                                             : Value::Truth::True);
}

namespace {

// -1, 0, 1 comparison on known operands at common width.
int compare_known(const Value& a, const Value& b) {
    auto [x, y] = extend_pair(a, b);
    bool s = x.is_signed() && y.is_signed();
    if (s) {
        Value::Bit ma = x.width() ? x.bit(x.width() - 1) : Value::Bit::Zero;
        Value::Bit mb = y.width() ? y.bit(y.width() - 1) : Value::Bit::Zero;
        if (ma == Value::Bit::One && mb != Value::Bit::One) return -1;
        if (ma != Value::Bit::One && mb == Value::Bit::One) return 1;
    }
    for (std::int64_t i = static_cast<std::int64_t>(x.width()) - 1; i >= 0; --i) {
        auto ba = x.bit(static_cast<std::uint32_t>(i));
        auto bb = y.bit(static_cast<std::uint32_t>(i));
        if (ba == bb) continue;
        return ba == Value::Bit::One ? 1 : -1;
    }
    return 0;
}

}  // namespace

Value logic_lt(const Value& a, const Value& b) {
    if (a.has_unknown() || b.has_unknown()) return Value::from_truth(Value::Truth::Unknown);
    return Value::from_truth(compare_known(a, b) < 0 ? Value::Truth::True : Value::Truth::False);
}
Value logic_le(const Value& a, const Value& b) {
    if (a.has_unknown() || b.has_unknown()) return Value::from_truth(Value::Truth::Unknown);
    return Value::from_truth(compare_known(a, b) <= 0 ? Value::Truth::True : Value::Truth::False);
}
Value logic_gt(const Value& a, const Value& b) {
    if (a.has_unknown() || b.has_unknown()) return Value::from_truth(Value::Truth::Unknown);
    return Value::from_truth(compare_known(a, b) > 0 ? Value::Truth::True : Value::Truth::False);
}
Value logic_ge(const Value& a, const Value& b) {
    if (a.has_unknown() || b.has_unknown()) return Value::from_truth(Value::Truth::Unknown);
    return Value::from_truth(compare_known(a, b) >= 0 ? Value::Truth::True : Value::Truth::False);
}

bool case_eq(const Value& a, const Value& b) {
    auto [x, y] = extend_pair(a, b);
    return x.identical(y);
}

bool casez_match(const Value& subject, const Value& label) {
    auto [x, y] = extend_pair(subject, label);
    for (std::uint32_t i = 0; i < x.width(); ++i) {
        auto sb = x.bit(i);
        auto lb = y.bit(i);
        if (sb == Value::Bit::Z || lb == Value::Bit::Z) continue;
        if (sb != lb) return false;
    }
    return true;
}

bool casex_match(const Value& subject, const Value& label) {
    auto [x, y] = extend_pair(subject, label);
    for (std::uint32_t i = 0; i < x.width(); ++i) {
        auto sb = x.bit(i);
        auto lb = y.bit(i);
        if (sb == Value::Bit::Z || lb == Value::Bit::Z || sb == Value::Bit::X ||
            lb == Value::Bit::X)
            continue;
        if (sb != lb) return false;
    }
    return true;
}

Value Value::reduce_and() const {
    Bit acc = Bit::One;
    for (std::uint32_t i = 0; i < width_; ++i) acc = and_bits(acc, bit(i));
    Value v(1);
    v.set_bit(0, acc);
    return v;
}

Value Value::reduce_or() const {
    Bit acc = Bit::Zero;
    for (std::uint32_t i = 0; i < width_; ++i) acc = or_bits(acc, bit(i));
    Value v(1);
    v.set_bit(0, acc);
    return v;
}

Value Value::reduce_xor() const {
    Bit acc = Bit::Zero;
    for (std::uint32_t i = 0; i < width_; ++i) acc = xor_bits(acc, bit(i));
    Value v(1);
    v.set_bit(0, acc);
    return v;
}

Value Value::concat(const std::vector<Value>& parts) {
    std::uint64_t total = 0;
    for (const auto& p : parts) total += p.width();
    if (total == 0) return Value(1);
    Value out(static_cast<std::uint32_t>(total));
    std::uint32_t pos = out.width();
    for (const auto& p : parts) {
        pos -= p.width();
        for (std::uint32_t i = 0; i < p.width(); ++i) out.set_bit(pos + i, p.bit(i));
    }
    return out;
}

std::string Value::fmt_bin() const {
    std::string out;
    out.reserve(width_);
    for (std::int64_t i = static_cast<std::int64_t>(width_) - 1; i >= 0; --i) {
        switch (bit(static_cast<std::uint32_t>(i))) {
            case Bit::Zero: out += '0'; break;
            case Bit::One: out += '1'; break;
            case Bit::Z: out += 'z'; break;
            case Bit::X: out += 'x'; break;
        }
    }
    return out;
}

namespace {

std::string fmt_grouped(const Value& v, std::uint32_t group) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    std::uint32_t ndigits = (v.width() + group - 1) / group;
    for (std::int64_t d = static_cast<std::int64_t>(ndigits) - 1; d >= 0; --d) {
        std::uint32_t lo = static_cast<std::uint32_t>(d) * group;
        int val = 0;
        bool any_x = false, any_z = false, all_x = true, all_z = true;
        for (std::uint32_t i = 0; i < group; ++i) {
            std::uint32_t pos = lo + i;
            if (pos >= v.width()) {
                all_x = all_z = false;
                continue;
            }
            switch (v.bit(pos)) {
                case Value::Bit::Zero: all_x = all_z = false; break;
                case Value::Bit::One: val |= 1 << i; all_x = all_z = false; break;
                case Value::Bit::Z: any_z = true; all_x = false; break;
                case Value::Bit::X: any_x = true; all_z = false; break;
            }
        }
        if (all_x && any_x) out += 'x';
        else if (all_z && any_z) out += 'z';
        else if (any_x || any_z) out += 'X';
        else out += digits[val];
    }
    return out;
}

}  // namespace

std::string Value::fmt_hex() const { return fmt_grouped(*this, 4); }
std::string Value::fmt_oct() const { return fmt_grouped(*this, 3); }

std::string Value::fmt_dec() const {
    if (has_unknown()) return is_all_x() ? "x" : "X";
    bool neg = false;
    Value mag = *this;
    if (signed_ && width_ > 0 && bit(width_ - 1) == Bit::One) {
        neg = true;
        mag = arith_neg(*this).as_signed(false);
    }
    // repeated division by 10 over the value plane
    std::vector<std::uint64_t> plane(mag.words(), 0);
    for (std::uint32_t i = 0; i < mag.width(); ++i)
        if (mag.bit(i) == Bit::One) plane[i / 64] |= 1ull << (i % 64);
    std::string out;
    auto is_zero = [&] {
        for (auto w : plane)
            if (w) return false;
        return true;
    };
    if (is_zero()) return "0";
    while (!is_zero()) {
        unsigned __int128 rem = 0;
        for (std::size_t i = plane.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | plane[i];
            plane[i] = static_cast<std::uint64_t>(cur / 10);
            rem = cur % 10;
        }
        out += static_cast<char>('0' + static_cast<int>(rem));
    }
    if (neg) out += '-';
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<Value> Value::parse_literal(std::string_view text) {
    std::string clean;
    clean.reserve(text.size());
    for (char c : text)
        if (c != '_') clean.push_back(c);
    if (clean.empty()) return std::nullopt;

    auto tick = clean.find('\'');
    if (tick == std::string::npos) {
        // plain decimal (reals are rejected here; the caller filters)
        for (char c : clean)
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        unsigned __int128 v = 0;
        for (char c : clean) {
            v = v * 10 + static_cast<unsigned>(c - '0');
            if (v > (static_cast<unsigned __int128>(1) << 63)) return std::nullopt;
        }
        return Value::from_int(static_cast<std::int64_t>(v), 32);
    }

    std::uint32_t size = 0;
    bool sized = tick > 0;
    if (sized) {
        for (std::size_t i = 0; i < tick; ++i) {
            char c = clean[i];
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            size = size * 10 + static_cast<std::uint32_t>(c - '0');
        }
        if (size == 0 || size > 1u << 20) return std::nullopt;
    }
    std::size_t p = tick + 1;
    bool is_signed = false;
    if (p < clean.size() && (clean[p] == 's' || clean[p] == 'S')) {
        is_signed = true;
        ++p;
    }
    if (p >= clean.size()) return std::nullopt;
    char base = static_cast<char>(std::tolower(static_cast<unsigned char>(clean[p])));
    ++p;
    std::string_view digits = std::string_view(clean).substr(p);
    if (digits.empty()) return std::nullopt;

    int bits_per = 0;
    switch (base) {
        case 'b': bits_per = 1; break;
        case 'o': bits_per = 3; break;
        case 'h': bits_per = 4; break;
        case 'd': bits_per = 0; break;
        default: return std::nullopt;
    }

    if (bits_per == 0) {
        // decimal body; single x/z allowed
        if (digits.size() == 1 &&
            (digits[0] == 'x' || digits[0] == 'X' || digits[0] == 'z' || digits[0] == 'Z')) {
            std::uint32_t w = sized ? size : 32;
            return Value::filled(w, std::tolower(digits[0]) == 'x' ? Bit::X : Bit::Z)
                .as_signed(is_signed);
        }
        unsigned __int128 v = 0;
        for (char c : digits) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            v = v * 10 + static_cast<unsigned>(c - '0');
            if (v >> 64) return std::nullopt;
        }
        std::uint32_t w = sized ? size : 32;
        Value out = Value::from_uint(static_cast<std::uint64_t>(v), std::max<std::uint32_t>(w, 64))
                        .resized(w);
        return out.as_signed(is_signed);
    }

    std::vector<Bit> bits;  // LSB first
    for (std::size_t i = digits.size(); i-- > 0;) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(digits[i])));
        if (c == 'x' || c == 'z' || c == '?') {
            Bit b = c == 'x' ? Bit::X : Bit::Z;
            for (int k = 0; k < bits_per; ++k) bits.push_back(b);
            continue;
        }
        int dv = digit_value(c);
        if (dv < 0 || dv >= (1 << bits_per)) return std::nullopt;
        for (int k = 0; k < bits_per; ++k)
            bits.push_back(((dv >> k) & 1) ? Bit::One : Bit::Zero);
    }
    std::uint32_t w = sized ? size : std::max<std::uint32_t>(32, static_cast<std::uint32_t>(bits.size()));
    Value out(w);
    // extension rule: a leading x/z digit extends with that state
    Bit fill = Bit::Zero;
    if (!bits.empty() && (bits.back() == Bit::X || bits.back() == Bit::Z)) fill = bits.back();
    for (std::uint32_t i = 0; i < w; ++i) {
        out.set_bit(i, i < bits.size() ? bits[i] : fill);
    }
    return out.as_signed(is_signed);
}

}  // namespace rtlforge::vlog
