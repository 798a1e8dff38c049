#pragma once

// Text form of polynomials, e.g.  "3*s1^2*s2 - (0,1)*s3 + 2.5".
//
//   poly    := [sign] term { sign term }
//   term    := factor { '*' factor }
//   factor  := number | '(' number ',' number ')' | 's' index [ '^' exponent ]
//
// Whitespace is free between tokens. Variables are 1-based and must not
// exceed nvars. Errors carry the 0-based offset of the offending
// character for caret diagnostics.

#include <cctype>
#include <complex>
#include <string>

#include "cylfi/errors.hpp"
#include "cylfi/polytensor.hpp"

namespace cylfi {

namespace detail {

class PolyParser {
  public:
    PolyParser(const std::string& text, int nvars) : text_(text), nvars_(nvars) {}

    Polynomial parse() {
        Polynomial p(nvars_);
        skip_ws();
        if (at_end()) throw parse_error("empty polynomial", pos_);
        double sign = 1.0;
        if (peek() == '+' || peek() == '-') sign = (take() == '-') ? -1.0 : 1.0;
        p += parse_term(sign);
        skip_ws();
        while (!at_end()) {
            const char c = peek();
            if (c != '+' && c != '-')
                throw parse_error(std::string("expected '+' or '-', got '") + c + "'", pos_);
            take();
            p += parse_term(c == '-' ? -1.0 : 1.0);
            skip_ws();
        }
        return p;
    }

  private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char take() { return text_[pos_++]; }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    Polynomial parse_term(double sign) {
        Polynomial term = Polynomial::constant(nvars_, cxd(sign, 0.0));
        while (true) {
            term = term * parse_factor();
            skip_ws();
            if (at_end() || peek() != '*') return term;
            take();
        }
    }

    Polynomial parse_factor() {
        skip_ws();
        if (at_end()) throw parse_error("expected a factor", pos_);
        const char c = peek();
        if (c == '(') return parse_complex();
        if (c == 's') return parse_variable();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return Polynomial::constant(nvars_, cxd(parse_number(), 0.0));
        throw parse_error(std::string("expected a number, complex literal or variable, got '") + c + "'",
                          pos_);
    }

    Polynomial parse_complex() {
        take(); // '('
        skip_ws();
        const double re = parse_signed_number();
        skip_ws();
        if (at_end() || peek() != ',') throw parse_error("expected ',' in complex literal", pos_);
        take();
        skip_ws();
        const double im = parse_signed_number();
        skip_ws();
        if (at_end() || peek() != ')') throw parse_error("expected ')' in complex literal", pos_);
        take();
        return Polynomial::constant(nvars_, cxd(re, im));
    }

    Polynomial parse_variable() {
        const std::size_t at = pos_;
        take(); // 's'
        const int idx = parse_int("variable index");
        if (idx < 1 || idx > nvars_)
            throw parse_error("variable s" + std::to_string(idx) + " out of range 1.." +
                                  std::to_string(nvars_),
                              at);
        int exp = 1;
        skip_ws();
        if (!at_end() && peek() == '^') {
            take();
            skip_ws();
            exp = parse_int("exponent");
            if (exp < 0) throw parse_error("negative exponent", at);
        }
        Polynomial v = Polynomial::variable(nvars_, idx);
        Polynomial out = Polynomial::constant(nvars_, cxd(1.0, 0.0));
        for (int e = 0; e < exp; ++e) out = out * v;
        return out;
    }

    double parse_signed_number() {
        double sign = 1.0;
        if (!at_end() && (peek() == '+' || peek() == '-')) sign = (take() == '-') ? -1.0 : 1.0;
        return sign * parse_number();
    }

    double parse_number() {
        skip_ws();
        const std::size_t at = pos_;
        std::size_t len = 0;
        while (pos_ + len < text_.size()) {
            const char c = text_[pos_ + len];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' ||
                ((c == '+' || c == '-') && len > 0 &&
                 (text_[pos_ + len - 1] == 'e' || text_[pos_ + len - 1] == 'E')))
                ++len;
            else
                break;
        }
        if (len == 0) throw parse_error("expected a number", at);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text_.substr(pos_, len), &used);
        } catch (const std::exception&) {
            throw parse_error("malformed number", at);
        }
        pos_ += used;
        return v;
    }

    int parse_int(const std::string& what) {
        skip_ws();
        const std::size_t at = pos_;
        std::size_t len = 0;
        while (pos_ + len < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_ + len])))
            ++len;
        if (len == 0) throw parse_error("expected " + what, at);
        const int v = std::stoi(text_.substr(pos_, len));
        pos_ += len;
        return v;
    }

    const std::string& text_;
    int nvars_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Polynomial parse_polynomial(const std::string& text, int nvars) {
    return detail::PolyParser(text, nvars).parse();
}

// Caret diagnostic for a parse error, one line of input plus a pointer.
inline std::string caret_message(const std::string& text, const parse_error& e) {
    std::string out = std::string(e.what()) + "\n  " + text + "\n  ";
    for (std::size_t i = 0; i < e.position && i < text.size(); ++i) out += ' ';
    out += '^';
    return out;
}

} // namespace cylfi
