#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "kp/cn_system.hpp"
#include "kp/field.hpp"
#include "kp/gmres.hpp"
#include "kp/modal.hpp"
#include "kp/spectral.hpp"

namespace kp {

// u_t + u_xxx + u^p u_x + lambda d_x^{-1} u_yy = 0
struct ModelParams {
  int p = 1;
  double lambda = -1.0;  // -1: KP-I, +1: KP-II

  void validate() const;
};

enum class SchemeKind { CompactFull, SpectralFull, MixedSpectralCompact };
enum class PreconditionerKind { Diagonal, Modal };

std::string to_string(SchemeKind k);
std::string to_string(PreconditionerKind k);

struct PicardParams {
  double tol = 1e-12;
  int max_iter = 50;
};

struct SchemeConfig {
  SchemeKind kind = SchemeKind::CompactFull;
  int order = 4;  // compact order in x and y, or the y order of the mixed scheme
  PicardParams picard;
  GmresParams gmres;
  PreconditionerKind preconditioner = PreconditionerKind::Diagonal;
  bool dealias = false;  // two-thirds filter on the nonlinear term (spectral directions only)

  // Checks the settings against the grid: compact needs odd nx, spectral
  // directions need an even number of points, full spectral needs periodic y.
  void validate(const Grid2D& g) const;
};

struct TimeParams {
  double dt = 0;
  std::optional<double> t_end;
  std::optional<long> n_steps;

  long steps() const;
  void validate() const;
};

struct StepReport {
  int picard_iters = 0;
  double last_picard_delta = 0;
  int gmres_total_iters = 0;
  double max_gmres_residual = 0;
};

// Fixed-point driver: U^{s+1} = linear_solve(nonlinear_rhs(U^s), U^s) from U^0 = initial,
// stopping when |U^{s+1} - U^s| / max(|U^s|, 1) < tol. Throws PicardDiverged after three
// consecutive growing updates, on non-finite iterates, or when max_iter is spent.
using NonlinearRhs = std::function<RowMatrixXd(const RowMatrixXd&)>;
using LinearSolve = std::function<RowMatrixXd(const RowMatrixXd& rhs, const RowMatrixXd& guess)>;
RowMatrixXd picard_iterate(const RowMatrixXd& initial, const LinearSolve& linear_solve,
                           const NonlinearRhs& nonlinear_rhs, const PicardParams& params, StepReport& report);

// One discretization with its operators and factorizations built for a fixed
// (grid, model, scheme, dt).
class Stepper {
 public:
  Stepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt);
  virtual ~Stepper() = default;
  Stepper(const Stepper&) = delete;  // subclasses hold maps bound to their own members
  Stepper& operator=(const Stepper&) = delete;

  const Grid2D& grid() const { return grid_; }
  const ModelParams& model() const { return model_; }
  const SchemeConfig& scheme() const { return scheme_; }
  double dt() const { return dt_; }

  // Advances u by one time step in place.
  StepReport step(Field& u) const;

  // Discrete u_x and d_x^{-1} u_y of the same family, for the energy diagnostic.
  virtual RowMatrixXd x_derivative(const RowMatrixXd& u) const = 0;
  virtual RowMatrixXd antiderivative_of_y_derivative(const RowMatrixXd& u) const = 0;

 protected:
  virtual RowMatrixXd advance(const RowMatrixXd& un, StepReport& report) const = 0;
  // ((u_n + v) / 2)^{p+1}
  RowMatrixXd midpoint_power(const RowMatrixXd& un, const RowMatrixXd& v) const;

  Grid2D grid_;
  ModelParams model_;
  SchemeConfig scheme_;
  double dt_;
};

class CompactStepper final : public Stepper {
 public:
  CompactStepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt);
  const CompactOperators2D& operators() const { return ops_; }
  RowMatrixXd x_derivative(const RowMatrixXd& u) const override;
  RowMatrixXd antiderivative_of_y_derivative(const RowMatrixXd& u) const override;

 private:
  RowMatrixXd advance(const RowMatrixXd& un, StepReport& report) const override;

  CompactOperators2D ops_;
  LinearMap a_;
  std::unique_ptr<CompactModalPreconditioner> modal_;
  LinearMap precond_;
};

class SpectralStepper final : public Stepper {
 public:
  SpectralStepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt);
  RowMatrixXd x_derivative(const RowMatrixXd& u) const override;
  RowMatrixXd antiderivative_of_y_derivative(const RowMatrixXd& u) const override;

 private:
  RowMatrixXd advance(const RowMatrixXd& un, StepReport& report) const override;

  Fft2D fft_;
  SpectralOperator1D dx_, dy_, anti_;
  // V = propagator * U_n + forcing * N, per (ky, kx) mode
  RowMatrixXcd propagator_, forcing_;
};

class MixedStepper final : public Stepper {
 public:
  MixedStepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme, double dt);
  RowMatrixXd x_derivative(const RowMatrixXd& u) const override;
  RowMatrixXd antiderivative_of_y_derivative(const RowMatrixXd& u) const override;

 private:
  RowMatrixXd advance(const RowMatrixXd& un, StepReport& report) const override;

  RowFft fft_;
  SpectralOperator1D dx_, anti_;
  CompactOperator1D dy_, dyy_;
  Eigen::VectorXcd sigma3_, tau_, nonlinear_;  // per x-mode
  ModalYSolver solver_;
};

std::unique_ptr<Stepper> make_stepper(const Grid2D& g, const ModelParams& model, const SchemeConfig& scheme,
                                      double dt);

// One-shot conveniences; each builds its operators from scratch.
std::pair<Field, StepReport> step_compact(const Field& un, const ModelParams& model, const SchemeConfig& scheme,
                                          double dt);
std::pair<Field, StepReport> step_spectral(const Field& un, const ModelParams& model, const SchemeConfig& scheme,
                                           double dt);
std::pair<Field, StepReport> step_mixed(const Field& un, const ModelParams& model, const SchemeConfig& scheme,
                                        double dt);

}  // namespace kp
