#pragma once

#include <string>
#include <string_view>

namespace udiscrim {

/// Every numerical threshold used by the library, in one place.
/// Defaults are the values the acceptance suite is pinned against.
struct Tolerances {
  double unitarity = 1e-10;        // max |U^dag U - I|
  double hermiticity = 1e-10;      // max |H - H^dag|
  double eigen_residual = 1e-9;    // |M v - lambda v|
  double degeneracy = 1e-8;        // grouping of near-equal eigenvalues
  double unit_modulus = 1e-8;      // |lambda| = 1 check for covering_arc
  double angle_merge = 1e-8;       // angle deduplication
  double arc_slack = 1e-9;         // delta >= pi - slack
  double singular_cutoff = 1e-12;  // SVD completion threshold
  double rank_cutoff = 1e-8;       // operator-Schmidt rank
  double reconstruction = 1e-8;    // product / swap factor reconstruction
  double closure_residual = 1e-8;  // Lie closure Gram-Schmidt residual
  double overlap = 1e-9;           // orthogonality of output states
  double walgate_cost = 1e-10;     // sum |<eta_k|nu_k>|^2
  double projector = 1e-10;        // P^2 = P
  double probability_prune = 1e-12;
  double phase_equivalence = 1e-9; // U^dag V proportional to identity

  /// Sets a field by name. Returns false for unknown names.
  bool set(std::string_view name, double value);
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

inline bool Tolerances::set(std::string_view name, double value) {
  struct Entry {
    std::string_view key;
    double Tolerances::*field;
  };
  static constexpr Entry entries[] = {
      {"unitarity", &Tolerances::unitarity},
      {"hermiticity", &Tolerances::hermiticity},
      {"eigen_residual", &Tolerances::eigen_residual},
      {"degeneracy", &Tolerances::degeneracy},
      {"unit_modulus", &Tolerances::unit_modulus},
      {"angle_merge", &Tolerances::angle_merge},
      {"arc_slack", &Tolerances::arc_slack},
      {"singular_cutoff", &Tolerances::singular_cutoff},
      {"rank_cutoff", &Tolerances::rank_cutoff},
      {"reconstruction", &Tolerances::reconstruction},
      {"closure_residual", &Tolerances::closure_residual},
      {"overlap", &Tolerances::overlap},
      {"walgate_cost", &Tolerances::walgate_cost},
      {"projector", &Tolerances::projector},
      {"probability_prune", &Tolerances::probability_prune},
      {"phase_equivalence", &Tolerances::phase_equivalence},
  };
  for (const auto& e : entries) {
    if (e.key == name) {
      this->*(e.field) = value;
      return true;
    }
  }
  return false;
}

/// Visits (name, value) pairs in declaration order; used for report echo.
template <typename F>
void for_each_tolerance(const Tolerances& t, F&& f) {
  f("unitarity", t.unitarity);
  f("hermiticity", t.hermiticity);
  f("eigen_residual", t.eigen_residual);
  f("degeneracy", t.degeneracy);
  f("unit_modulus", t.unit_modulus);
  f("angle_merge", t.angle_merge);
  f("arc_slack", t.arc_slack);
  f("singular_cutoff", t.singular_cutoff);
  f("rank_cutoff", t.rank_cutoff);
  f("reconstruction", t.reconstruction);
  f("closure_residual", t.closure_residual);
  f("overlap", t.overlap);
  f("walgate_cost", t.walgate_cost);
  f("projector", t.projector);
  f("probability_prune", t.probability_prune);
  f("phase_equivalence", t.phase_equivalence);
}

}  // namespace udiscrim
