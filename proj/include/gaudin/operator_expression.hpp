// operator_expression.hpp — symbolic sums of products of boson and quasispin
// operators, realized as matrices by the ED oracle.
#pragma once

#include "gaudin/algebra.hpp"

#include <string>
#include <vector>

namespace gaudin {

enum class OpSymbol {
    boson_create,      // b^dagger
    boson_annihilate,  // b
    boson_number,      // b^dagger b
    spin_raise,        // S^dagger
    spin_lower,        // S
    spin_weight,       // S^0
};

constexpr bool is_boson(OpSymbol s) noexcept {
    return s == OpSymbol::boson_create || s == OpSymbol::boson_annihilate || s == OpSymbol::boson_number;
}

OpSymbol adjoint(OpSymbol s) noexcept;
std::string to_string(OpSymbol s);

struct OpFactor {
    OpSymbol symbol;
    int site;

    friend bool operator==(const OpFactor&, const OpFactor&) = default;
};

struct OpTerm {
    cplx coefficient;
    std::vector<OpFactor> factors;  // applied right to left, as written
};

class OperatorExpression {
public:
    OperatorExpression() = default;

    // Adds coefficient * f_1 f_2 ... f_k. Factors on different sites are put
    // in canonical order (bosons first, then by site); the order of factors
    // on one site is preserved.
    OperatorExpression& add(cplx coefficient, std::vector<OpFactor> factors);
    OperatorExpression& add_identity(cplx coefficient) { return add(coefficient, {}); }

    const std::vector<OpTerm>& terms() const noexcept { return terms_; }
    std::size_t term_count() const noexcept { return terms_.size(); }

    // Sum of coefficients of terms with exactly these (canonicalized) factors.
    cplx coefficient(std::vector<OpFactor> factors) const;

    OperatorExpression adjoint() const;
    // Merges equal factor strings and drops coefficients below `tol`.
    OperatorExpression simplified(double tol = 0.0) const;

    bool observable() const noexcept { return observable_; }
    void set_observable(bool v) noexcept { observable_ = v; }

    int max_site() const;

    OperatorExpression& operator+=(const OperatorExpression& other);
    OperatorExpression& operator*=(cplx s);
    friend OperatorExpression operator+(OperatorExpression a, const OperatorExpression& b) { return a += b; }
    friend OperatorExpression operator-(OperatorExpression a, OperatorExpression b) { return a += (b *= -1.0); }
    friend OperatorExpression operator*(cplx s, OperatorExpression a) { return a *= s; }

private:
    std::vector<OpTerm> terms_;
    bool observable_{false};
};

std::vector<OpFactor> canonical_order(std::vector<OpFactor> factors);

}  // namespace gaudin
