#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "philab/grid.hpp"
#include "philab/phi_family.hpp"

namespace philab {

// Sum over cells of Phi(x_c, |u_c|) h^d, u_c the average of the cell corners.
double modular(const PhiFamily& family, const GridDomain& domain, const ScalarField& field);
// Same quadrature for magnitudes already given per cell.
double modular_cells(const PhiFamily& family, const GridDomain& domain,
                     std::span<const double> cell_magnitudes);

double luxemburg_norm(const PhiFamily& family, const GridDomain& domain, const ScalarField& field);
double luxemburg_norm_cells(const PhiFamily& family, const GridDomain& domain,
                            std::span<const double> cell_magnitudes);

struct EmbeddingRow {
  double norm_phi = 0.0;
  double norm_psi = 0.0;
  double ratio = 0.0;
};

struct EmbeddingReport {
  double beta = 1.0;
  double bound = 0.0;
  double worst_ratio = 0.0;
  bool pass = true;
  std::vector<EmbeddingRow> rows;
};

// Constructive constant of the Phi <= Psi embedding.
double embedding_constant(double measure, double beta, double p_plus_phi, double p_plus_psi);

// beta defaults to the smaller of the two families' normalization betas.
EmbeddingReport embedding_check(const PhiFamily& phi, const PhiFamily& psi,
                                const GridDomain& domain, const std::vector<ScalarField>& fields,
                                std::optional<double> beta = std::nullopt);

struct BallVerdict {
  Point center{0.0, 0.0};
  double p_minus = 0.0;
  double p_plus = 0.0;
  bool pass = true;
};

struct JumpConditionReport {
  double delta = 0.0;
  int dim = 2;
  std::vector<BallVerdict> balls;
  bool pass = true;
};

// p* = d p / (d - p) for p < d, +infinity otherwise.
double sobolev_conjugate(double p, int dim);

JumpConditionReport jump_condition(const PhiFamily& family, const GridDomain& domain, double delta,
                                   int s_samples = 16);

struct PoincareRow {
  int trial = 0;
  double norm_u = 0.0;
  double norm_grad = 0.0;
  double ratio = 0.0;
};

struct PoincareReport {
  std::vector<PoincareRow> rows;
  int skipped = 0;
  double sup_ratio = 0.0;
};

// Random field vanishing on the box boundary: sum of 8 sine products with
// integer frequencies in [1, 4] and amplitudes in [-1, 1].
ScalarField random_sine_field(const GridDomain& domain, std::uint64_t seed, std::uint64_t trial);

PoincareReport poincare_ratio(const PhiFamily& family, const GridDomain& domain, int trials,
                              std::uint64_t seed);

}  // namespace philab
