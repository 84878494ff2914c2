// Barcode templates over the cells of the anchor-line arrangement.

#pragma once

#include "bifiber/arrangement.hpp"
#include "bifiber/betti.hpp"
#include "bifiber/model.hpp"
#include "bifiber/persistence.hpp"

#include <array>
#include <optional>
#include <vector>

namespace bifiber {

struct TemplateBar {
    Bigrade birth;
    std::optional<Bigrade> death;  // nullopt: infinite
    int multiplicity = 1;

    friend bool operator==(const TemplateBar&, const TemplateBar&) = default;
};

/// Sorted by (birth, death) in lexicographic order, infinite deaths last.
using BarcodeTemplate = std::vector<TemplateBar>;

/// Merges equal bars and sorts.
BarcodeTemplate canonical_template(std::vector<TemplateBar> bars);

struct AugmentedArrangement {
    bool has_bounds = false;
    Bigrade lower;  // glb of all grades
    Bigrade upper;  // lub of all grades
    Rational shift; // arrangement x = original x + shift
    Index m1 = 0;   // sizes of the FI-rep the templates were computed from
    Index m2 = 0;
    int kappa_x = 0;
    int kappa_y = 0;
    BettiTable betti;
    DimGrid dims;
    std::vector<Bigrade> support;
    std::vector<Bigrade> anchors;  // anchor k induces dcel line k
    Dcel dcel;
    std::vector<BarcodeTemplate> templates;  // one per face

    Locator locator;
    VerticalLookup vertical;

    int kappa() const { return kappa_x * kappa_y; }

    /// Rebuilds the locator and the vertical lookup from the dcel.
    void rebuild_indices();
};

// ---- pieces of the construction, exposed for testing ----

/// Discretized module restricted to box(S) plus its template points.
struct TemplateInput {
    GridFIRep rep;            // trimmed, colexicographically sorted columns
    XiMatrix xi;
    std::vector<GridPoint> support;
    std::vector<int> anchor_entry;  // dcel line k -> Xi entry
    Dcel dcel;
    Rational shift;
};

/// Ordered template points of a cell (Xi entry ids) from a representative
/// line through the cell.
std::vector<int> cell_chain(const TemplateInput& in, int face);

/// Entry id of the least chain element dominating g.
int lift_to_chain(const TemplateInput& in, const std::vector<int>& chain, GridPoint g);

/// Template of a cell by direct reduction at that cell.
BarcodeTemplate template_from_scratch(const TemplateInput& in, int face);

struct CrossingCounts {
    long switches[2] = {0, 0};
    long separations[2] = {0, 0};

    Rational weight() const;
};

/// Switch and separation counts per dcel line.
std::vector<CrossingCounts> edge_weights(const TemplateInput& in, const DualGraph& graph);

struct PathStep {
    int cell = -1;
    int edge = -1;     // dual-graph edge crossed to reach the cell; -1 for the start
    bool up = false;   // crossing from the lower to the upper face of that edge
};

struct CellPath {
    std::vector<PathStep> steps;
    Rational weight;
    Rational mst_weight;
};

/// Kruskal tree plus a depth-first walk from the start cell that does not
/// return from its deepest branch.
CellPath compute_path(const DualGraph& graph, const std::vector<Rational>& edge_weight, int start);

enum class Option { A, B, C };

struct StepCosts {
    double a = 0;
    double b = 0;
    double c = 0;
};

struct Strategy {
    std::vector<Option> choice;
    double total = 0;
};

/// Exact minimum over assignments with choice[0] != C and no C directly
/// after an A. With ru_valid, step 0 may also be C.
Strategy plan_strategy(const std::vector<StepCosts>& costs, bool ru_valid = false);

enum class StrategyMode { Auto, AllB, AllC };

struct BuildOptions {
    StrategyMode mode = StrategyMode::Auto;
    bool check = false;              // instrumented invariants at every step
    bool simplify = true;            // cancel equal-grade pairs first
    int calibration_updates = 2000;  // random vineyard updates for the cost model
    bool replan = true;              // re-estimate costs every 5% of the path
};

struct BuildStats {
    long transpositions = 0;
    long steps = 0;
    long option_count[3] = {0, 0, 0};
    long checks = 0;
    long transition_checks = 0;  // RU checks after single vineyard updates
    Rational path_weight;
    Rational mst_weight;
    Index m1 = 0;
    Index m2 = 0;
    std::size_t anchor_count = 0;
    std::size_t face_count = 0;
    std::size_t max_template_size = 0;  // by total multiplicity
    std::size_t total_template_entries = 0;
};

/// Runs the template walk over `in` and returns one template per face.
std::vector<BarcodeTemplate> compute_templates(const TemplateInput& in, const BuildOptions& options,
                                               BuildStats* stats = nullptr);

/// Betti numbers, support, trimming, template points and arrangement.
TemplateInput prepare_templates(const GridFIRep& rep, const BettiTable& betti);

AugmentedArrangement compute_augmented_arrangement(const FIRep& rep, const BuildOptions& options = {},
                                                   BuildStats* stats = nullptr);

/// Uniform coarsening onto an nx x ny grid spanning the grade bounds.
FIRep coarsen_uniform(const FIRep& rep, int nx, int ny);

}  // namespace bifiber
