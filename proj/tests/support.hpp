// Shared fixtures and brute-force oracles for the test suites.

#pragma once

#include "bifiber/errors.hpp"
#include "bifiber/model.hpp"
#include "bifiber/query.hpp"
#include "bifiber/templates.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace bifiber;

Rational q(long p, long d = 1);
Bigrade g(long x, long y);
Bigrade g(const Rational& x, const Rational& y);

/// Presentation <gens | rels> as an FI-rep with m0 = 0. Each relation lists
/// the generators it involves.
FIRep presentation(const std::vector<Bigrade>& gens, const std::vector<std::pair<Bigrade, std::vector<Index>>>& rels);

/// <a@(1,0), b@(0,1), c@(1,1) | x2 a - x1 b>
FIRep module_m();
/// <a@(1,0), b@(0,1)>
FIRep module_n();
/// <a@(0,0) | x1 a, x2 a>
FIRep module_point();

/// Text form of module_m in the FI-rep input format.
std::string module_m_text();

/// Random valid 1-critical bifiltration with integer grades in [0, grid).
Bifiltration random_bifiltration(std::mt19937& rng, int max_vertices = 7, int grid = 5, int max_dim = 2);

/// Random FI-rep in degree 0 or 1 drawn from random_bifiltration.
FIRep random_firep(std::mt19937& rng, int degree, int max_vertices = 7, int grid = 5);

// ---- dense brute force, independent of the library's reductions ----

using DenseCol = std::vector<char>;

int dense_rank(std::vector<DenseCol> cols);
std::vector<DenseCol> dense_nullspace(const std::vector<DenseCol>& cols, std::size_t rows);

/// dim M_p.
int dim_at(const FIRep& rep, const Bigrade& p);

/// Rank of M_p -> M_q for p <= q.
int rank_between(const FIRep& rep, const Bigrade& p, const Bigrade& q);

/// Slice barcode recovered from the rank function on the line.
Barcode rank_barcode(const FIRep& rep, const LineSpec& line);

/// Random finite lines (slope 0 included), vertical lines, lines through
/// anchors and lines dual to arrangement vertices.
std::vector<LineSpec> sample_lines(std::mt19937& rng, const AugmentedArrangement& aug, int count);

std::string describe(const Barcode& bc);

}  // namespace testsupport
