#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>

#include "lamination/family.hpp"
#include "lamination/jet.hpp"

namespace lam {

struct Provenance {
  std::string construction;
  std::string family;
  double delta = 0.0;
  std::map<std::string, std::string> extra;
};

// A C^1 function on (a region of) Delta x C with evaluable gradient.
class Approximant {
 public:
  using Evaluator = std::function<Jet(Complex z, Complex w)>;

  Approximant(Evaluator eval, Provenance prov) : eval_(std::move(eval)), prov_(std::move(prov)) {}

  Jet jet(Complex z, Complex w) const { return eval_(z, w); }
  double value(Complex z, Complex w) const { return eval_(z, w).v; }
  Gradient gradient(Complex z, Complex w) const { return eval_(z, w).d; }

  const Provenance& provenance() const { return prov_; }

 private:
  Evaluator eval_;
  Provenance prov_;
};

// Continuous function, C^1 along every leaf, with its leafwise partials
// Phi = d/dx1 phi(x, f_c(x)) and Psi = d/dx2 phi(x, f_c(x)) evaluated at the
// point (z, w) of the leaf.
struct PartiallySmoothFn {
  std::string name;
  std::function<double(Complex z, Complex w)> value;
  std::function<double(Complex z, Complex w)> leaf_dx1;
  std::function<double(Complex z, Complex w)> leaf_dx2;
};

enum class Target { RePi, ImPi, Composite };

const char* target_name(Target t);

// Re or Im of the projection onto {p} x C (leaf-constant), or the composite
// sin(2 Re pi) + x1 Im pi + x2^2.
PartiallySmoothFn target_function(const LeafFamily& fam, Target t, Complex center = {});

enum class Axis { X1, X2 };

// d/dx_i [psi(x, f_c(x))] by the chain rule through the analytic gradient.
double leafwise_derivative(const Approximant& psi, const LeafFamily& fam, Complex c, Complex z,
                           Axis axis);

// Central difference along the leaf with step h, halved while the step
// leaves the unit disc.  Throws DomainError when no admissible step remains.
double leafwise_derivative(const std::function<double(Complex, Complex)>& fn,
                           const LeafFamily& fam, Complex c, Complex z, Axis axis,
                           double h = 1e-5);

}  // namespace lam
