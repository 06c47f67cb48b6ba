// spec_io.hpp — model-spec files: parsing, validation and emission.
//
//   model = dicke | rg
//   dicke: epsilons = [...], spins = [...], G = ..., hbar_omega = ..., N = ...
//          optional copy_spin = ... (spin of the contracting copy)
//   rg:    kind = trigonometric | rational, etas = [...],
//          spins = [...] or degeneracies = [...], g = ..., N = ...
//          optional far_spin = ... (extra copy at eta = infinity)
#pragma once

#include "gaudin/keyvalue.hpp"
#include "gaudin/rg_core.hpp"

#include <optional>
#include <string>
#include <variant>

namespace gaudin {

struct SpecFile {
    std::variant<ModelSpec, DickeSpec> model;
    std::optional<DeformedCopy> copy;  // dicke only

    bool is_dicke() const noexcept { return std::holds_alternative<DickeSpec>(model); }
    const ModelSpec& rg() const { return std::get<ModelSpec>(model); }
    const DickeSpec& dicke() const { return std::get<DickeSpec>(model); }
    DeformedCopy deformed_copy() const;
};

bool operator==(const ModelSpec& a, const ModelSpec& b);
bool operator==(const DickeSpec& a, const DickeSpec& b);
bool operator==(const SpecFile& a, const SpecFile& b);

SpecFile parse_spec_section(const KvSection& section);
SpecFile parse_spec_text(const std::string& text);
SpecFile parse_spec(const std::string& path);

// Writes the spec keys into the current section of `w`.
void emit_spec(const SpecFile& spec, KvWriter& w);
std::string emit_spec(const SpecFile& spec);

// Applies "key=value" overrides (g, G, hbar_omega, N) before validation.
void apply_override(SpecFile& spec, const std::string& key, double value);

}  // namespace gaudin
