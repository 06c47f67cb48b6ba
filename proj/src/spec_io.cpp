#include "gaudin/spec_io.hpp"

#include "gaudin/errors.hpp"

#include <cmath>

namespace gaudin {

namespace {

std::vector<Spin> spins_from(const KvSection& s, const std::string& key) {
    std::vector<Spin> out;
    const auto& e = s.at(key);
    for (double v : s.get_doubles(key)) {
        try {
            out.push_back(Spin::from_value(v));
        } catch (const DomainError& err) {
            throw ValidationError(std::string(err.what()) + " (key '" + key + "', line " + std::to_string(e.line) + ")");
        }
    }
    return out;
}

Spin spin_value(const KvSection& s, const std::string& key) {
    try {
        return Spin::from_value(s.get_double(key));
    } catch (const DomainError& err) {
        throw ValidationError(std::string(err.what()) + " (key '" + key + "')");
    }
}

int checked_n(long long n) {
    if (n < 1) throw ValidationError("N must be at least 1");
    if (n > 1000) throw ValidationError("N is unreasonably large");
    return static_cast<int>(n);
}

std::vector<double> spin_values(const std::vector<Spin>& spins) {
    std::vector<double> v;
    for (const Spin& s : spins) v.push_back(s.value());
    return v;
}

}  // namespace

DeformedCopy SpecFile::deformed_copy() const {
    if (copy) return *copy;
    return DeformedCopy::for_excitations(dicke().n_excitations);
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.levels == b.levels && a.kind == b.kind && a.n_excitations == b.n_excitations && a.g == b.g &&
           a.far_level == b.far_level;
}

bool operator==(const DickeSpec& a, const DickeSpec& b) {
    return a.epsilons == b.epsilons && a.spins == b.spins && a.coupling_G == b.coupling_G &&
           a.hbar_omega == b.hbar_omega && a.n_excitations == b.n_excitations;
}

bool operator==(const SpecFile& a, const SpecFile& b) {
    if (a.model.index() != b.model.index()) return false;
    if (a.is_dicke()) return a.dicke() == b.dicke() && a.copy == b.copy;
    return a.rg() == b.rg();
}

SpecFile parse_spec_section(const KvSection& s) {
    const std::string model = s.get_string("model");
    if (model == "dicke") {
        DickeSpec d;
        d.epsilons = s.get_doubles("epsilons");
        d.spins = spins_from(s, "spins");
        d.coupling_G = s.get_double("G");
        d.hbar_omega = s.get_double("hbar_omega");
        d.n_excitations = checked_n(s.get_int("N"));
        d.validate();
        SpecFile out{d, std::nullopt};
        if (s.has("copy_spin")) out.copy = DeformedCopy{spin_value(s, "copy_spin")};
        return out;
    }
    if (model == "rg") {
        const std::string kind_text = s.has("kind") ? s.get_string("kind") : "trigonometric";
        GaudinKind kind;
        if (kind_text == "trigonometric") {
            kind = GaudinKind::trigonometric;
        } else if (kind_text == "rational") {
            kind = GaudinKind::rational;
        } else {
            const auto& e = s.at("kind");
            throw ParseError("kind must be 'trigonometric' or 'rational'", e.line, e.column);
        }
        std::vector<Spin> spins;
        if (s.has("spins") && s.has("degeneracies")) {
            throw ValidationError("give either spins or degeneracies, not both");
        }
        if (s.has("spins")) {
            spins = spins_from(s, "spins");
        } else {
            for (long long o : s.get_ints("degeneracies")) {
                if (o < 2) throw ValidationError("degeneracies must be >= 2 (Omega = 2s + 1)");
                spins.emplace_back(static_cast<int>(o - 1));
            }
        }
        ModelSpec m{LevelSet(s.get_doubles("etas"), std::move(spins)), kind, checked_n(s.get_int("N")),
                    s.get_double("g"), std::nullopt};
        if (s.has("far_spin")) m.far_level = spin_value(s, "far_spin");
        m.validate();
        return SpecFile{m, std::nullopt};
    }
    const auto& e = s.at("model");
    throw ParseError("model must be 'dicke' or 'rg'", e.line, e.column);
}

SpecFile parse_spec_text(const std::string& text) {
    const KvDocument doc = KvDocument::parse(text);
    const KvSection* spec = doc.section("spec");
    return parse_spec_section(spec ? *spec : doc.sections().front());
}

SpecFile parse_spec(const std::string& path) {
    const KvDocument doc = KvDocument::read_file(path);
    const KvSection* spec = doc.section("spec");
    return parse_spec_section(spec ? *spec : doc.sections().front());
}

void emit_spec(const SpecFile& spec, KvWriter& w) {
    if (spec.is_dicke()) {
        const DickeSpec& d = spec.dicke();
        w.put("model", std::string("dicke"));
        w.put("epsilons", d.epsilons);
        w.put("spins", spin_values(d.spins));
        w.put("G", d.coupling_G);
        w.put("hbar_omega", d.hbar_omega);
        w.put("N", d.n_excitations);
        if (spec.copy) w.put("copy_spin", spec.copy->s0.value());
        w.put("units", std::string("energy"));
    } else {
        const ModelSpec& m = spec.rg();
        w.put("model", std::string("rg"));
        w.put("kind", std::string(m.kind == GaudinKind::trigonometric ? "trigonometric" : "rational"));
        w.put("etas", m.levels.etas());
        w.put("spins", spin_values(m.levels.spins()));
        w.put("g", m.g);
        w.put("N", m.n_excitations);
        if (m.far_level) w.put("far_spin", m.far_level->value());
        w.put("units", std::string("dimensionless"));
    }
}

std::string emit_spec(const SpecFile& spec) {
    KvWriter w;
    emit_spec(spec, w);
    return w.str();
}

void apply_override(SpecFile& spec, const std::string& key, double value) {
    if (spec.is_dicke()) {
        DickeSpec& d = std::get<DickeSpec>(spec.model);
        if (key == "G") {
            d.coupling_G = value;
        } else if (key == "hbar_omega") {
            d.hbar_omega = value;
        } else if (key == "N") {
            d.n_excitations = checked_n(std::llround(value));
        } else {
            throw ValidationError("unknown override '" + key + "' for a dicke spec");
        }
        d.validate();
    } else {
        ModelSpec& m = std::get<ModelSpec>(spec.model);
        if (key == "g") {
            m.g = value;
        } else if (key == "N") {
            m.n_excitations = checked_n(std::llround(value));
        } else {
            throw ValidationError("unknown override '" + key + "' for an rg spec");
        }
        m.validate();
    }
}

}  // namespace gaudin
