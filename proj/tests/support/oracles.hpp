#pragma once

#include <random>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nestasp/solver.hpp"

namespace testing {

using LiteralSet = std::set<nestasp::ClassicalLiteral>;

/// Ground program read literally from ground rule text (no simplification).
nestasp::GroundProgram ground_rules(std::string_view text);

/// Answer sets by exhaustive subset enumeration, straight from the definitions.
///
/// Atoms forced true or false by a well-founded style pass are fixed first; the remaining
/// ones are enumerated (at most 24, otherwise std::length_error).
std::set<LiteralSet> naive_answer_sets(const nestasp::GroundProgram& program);

/// Number of atoms left for enumeration after the forced pass.
std::size_t naive_search_width(const nestasp::GroundProgram& program);

std::set<LiteralSet> as_sets(const std::vector<nestasp::AnswerSet>& sets);

/// Character-by-character unescape of a string constant body; empty optional on a bad escape.
std::optional<std::string> reference_unescape(std::string_view body);

/// Random ground program over `atoms` propositional atoms, half of them strongly negated.
nestasp::GroundProgram random_ground_program(std::mt19937& rng, int atoms = 10, int max_rules = 12);

/// Text of a small random ground subprogram over p/1, val/1 and q/0.
std::string random_subprogram(std::mt19937& rng);

/// Graph search program whose answer sets are the `k` shortest s-t paths of a graph with
/// k parallel two-edge paths and one longer detour.
std::string paths_program(int k);

/// Host program whose call chain runs `k` embedded programs deep.
std::string chain_program(int k);

}  // namespace testing
