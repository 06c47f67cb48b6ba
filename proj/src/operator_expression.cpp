#include "gaudin/operator_expression.hpp"

#include "gaudin/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gaudin {

OpSymbol adjoint(OpSymbol s) noexcept {
    switch (s) {
        case OpSymbol::boson_create: return OpSymbol::boson_annihilate;
        case OpSymbol::boson_annihilate: return OpSymbol::boson_create;
        case OpSymbol::spin_raise: return OpSymbol::spin_lower;
        case OpSymbol::spin_lower: return OpSymbol::spin_raise;
        default: return s;
    }
}

std::string to_string(OpSymbol s) {
    switch (s) {
        case OpSymbol::boson_create: return "b+";
        case OpSymbol::boson_annihilate: return "b";
        case OpSymbol::boson_number: return "n";
        case OpSymbol::spin_raise: return "S+";
        case OpSymbol::spin_lower: return "S-";
        case OpSymbol::spin_weight: return "S0";
    }
    return "?";
}

std::vector<OpFactor> canonical_order(std::vector<OpFactor> factors) {
    std::stable_sort(factors.begin(), factors.end(), [](const OpFactor& a, const OpFactor& b) {
        const int ka = is_boson(a.symbol) ? 0 : 1;
        const int kb = is_boson(b.symbol) ? 0 : 1;
        if (ka != kb) return ka < kb;
        return a.site < b.site;
    });
    return factors;
}

OperatorExpression& OperatorExpression::add(cplx coefficient, std::vector<OpFactor> factors) {
    if (!std::isfinite(coefficient.real()) || !std::isfinite(coefficient.imag())) {
        throw ValidationError("operator coefficients must be finite");
    }
    for (const auto& f : factors) {
        if (f.site < 0) throw ValidationError("operator site index must be non-negative");
    }
    terms_.push_back({coefficient, canonical_order(std::move(factors))});
    return *this;
}

cplx OperatorExpression::coefficient(std::vector<OpFactor> factors) const {
    factors = canonical_order(std::move(factors));
    cplx sum = 0.0;
    for (const auto& t : terms_) {
        if (t.factors == factors) sum += t.coefficient;
    }
    return sum;
}

OperatorExpression OperatorExpression::adjoint() const {
    OperatorExpression out;
    out.observable_ = observable_;
    for (const auto& t : terms_) {
        std::vector<OpFactor> f(t.factors.rbegin(), t.factors.rend());
        for (auto& x : f) x.symbol = gaudin::adjoint(x.symbol);
        out.add(std::conj(t.coefficient), std::move(f));
    }
    return out;
}

OperatorExpression OperatorExpression::simplified(double tol) const {
    OperatorExpression out;
    out.observable_ = observable_;
    for (const auto& t : terms_) {
        auto it = std::find_if(out.terms_.begin(), out.terms_.end(),
                               [&](const OpTerm& o) { return o.factors == t.factors; });
        if (it == out.terms_.end()) {
            out.terms_.push_back(t);
        } else {
            it->coefficient += t.coefficient;
        }
    }
    std::erase_if(out.terms_, [tol](const OpTerm& t) { return std::abs(t.coefficient) <= tol; });
    return out;
}

int OperatorExpression::max_site() const {
    int m = -1;
    for (const auto& t : terms_) {
        for (const auto& f : t.factors) m = std::max(m, f.site);
    }
    return m;
}

OperatorExpression& OperatorExpression::operator+=(const OperatorExpression& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    observable_ = observable_ && other.observable_;
    return *this;
}

OperatorExpression& OperatorExpression::operator*=(cplx s) {
    for (auto& t : terms_) t.coefficient *= s;
    if (s.imag() != 0.0) observable_ = false;
    return *this;
}

}  // namespace gaudin
