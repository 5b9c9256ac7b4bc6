#ifndef SATORIS_METHODS_HPP
#define SATORIS_METHODS_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "satoris/baselines.hpp"
#include "satoris/formulations.hpp"

namespace satoris {

/// Hyperparameters of one method descriptor. Every key must be consumed by
/// the factory; leftovers are reported as unknown parameters.
class MethodParams {
 public:
  MethodParams(std::string method, nlohmann::json values) : method_(std::move(method)), values_(std::move(values)) {
    if (values_.is_null()) values_ = nlohmann::json::object();
    if (!values_.is_object()) throw ArgumentError(method_ + ": parameters must be an object");
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    try {
      return it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ArgumentError(method_ + ": parameter '" + key + "' has the wrong type");
    }
  }

  void require_all_used() const {
    for (const auto& [key, value] : values_.items()) {
      if (!used_.contains(key)) throw ArgumentError(method_ + ": unknown parameter '" + key + "'");
    }
  }

  const std::string& method() const { return method_; }

 private:
  std::string method_;
  nlohmann::json values_;
  std::set<std::string> used_;
};

/// What a method sees for one cell: the occluded target, its mask and the
/// fully observed neighbor day.
struct MethodInput {
  const Matrix& y;
  const ObservationMask& mask;
  const Matrix& neighbor;
};

struct MethodOutput {
  Matrix values;
  std::string status;  ///< solver status, or "ok" for direct methods
};

using MethodRunner = std::function<MethodOutput(const MethodInput&)>;
using ImputerFactory = std::function<std::shared_ptr<const Imputer>(MethodParams&, const SolverOptions&)>;
using RunnerFactory = std::function<MethodRunner(MethodParams&, const SolverOptions&)>;

inline std::string status_string(const std::optional<SolveStatus>& s) {
  return s ? std::string(to_string(*s)) : std::string("ok");
}

/// Method names to runners. Base imputers are also reachable with the
/// stacking suffixes -h ([Y1 | D2]) and -v ([Y1 ; D2]).
class MethodRegistry {
 public:
  static MethodRegistry builtin();

  void add_imputer(const std::string& name, ImputerFactory factory) {
    check_new(name);
    imputers_.emplace(name, std::move(factory));
  }

  void add_runner(const std::string& name, RunnerFactory factory) {
    check_new(name);
    runners_.emplace(name, std::move(factory));
  }

  void add_alias(const std::string& alias, const std::string& target) {
    check_new(alias);
    if (!contains(target)) throw ArgumentError("registry: alias target '" + target + "' is unknown");
    aliases_.emplace(alias, target);
  }

  bool contains(std::string_view name) const {
    if (aliases_.contains(name) || runners_.contains(name) || imputers_.contains(name)) return true;
    const auto [base, mode] = split_suffix(name);
    return mode.has_value() && imputers_.contains(base);
  }

  /// Every resolvable name, stacked variants included.
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, f] : imputers_) {
      out.push_back(name);
      out.push_back(name + "-h");
      out.push_back(name + "-v");
    }
    for (const auto& [name, f] : runners_) out.push_back(name);
    for (const auto& [name, target] : aliases_) out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
  }

  MethodRunner make(std::string_view requested, const nlohmann::json& params, const SolverOptions& solver) const {
    std::string name(requested);
    if (const auto it = aliases_.find(name); it != aliases_.end()) name = it->second;
    MethodParams p(std::string(requested), params);
    MethodRunner runner;
    if (const auto it = runners_.find(name); it != runners_.end()) {
      runner = it->second(p, solver);
    } else if (const auto it2 = imputers_.find(name); it2 != imputers_.end()) {
      std::shared_ptr<const Imputer> imputer = it2->second(p, solver);
      runner = [imputer](const MethodInput& in) {
        const Completion c = impute_detailed(*imputer, in.y, in.mask);
        return MethodOutput{c.values, status_string(c.status)};
      };
    } else {
      const auto [base, mode] = split_suffix(name);
      const auto it3 = imputers_.find(base);
      if (!mode || it3 == imputers_.end()) throw ArgumentError("unknown method '" + std::string(requested) + "'");
      std::shared_ptr<const Imputer> imputer = it3->second(p, solver);
      runner = [imputer, m = *mode](const MethodInput& in) {
        const Completion c = impute_stacked_detailed(*imputer, in.y, in.mask, in.neighbor, m);
        return MethodOutput{c.values, status_string(c.status)};
      };
    }
    p.require_all_used();
    return runner;
  }

 private:
  static std::pair<std::string, std::optional<StackingMode>> split_suffix(std::string_view name) {
    if (name.size() > 2 && name.ends_with("-h")) return {std::string(name.substr(0, name.size() - 2)), StackingMode::horizontal};
    if (name.size() > 2 && name.ends_with("-v")) return {std::string(name.substr(0, name.size() - 2)), StackingMode::vertical};
    return {std::string(name), std::nullopt};
  }

  void check_new(const std::string& name) const {
    if (name.empty()) throw ArgumentError("registry: empty method name");
    if (contains(name)) throw ArgumentError("registry: method '" + name + "' already registered");
  }

  std::map<std::string, ImputerFactory, std::less<>> imputers_;
  std::map<std::string, RunnerFactory, std::less<>> runners_;
  std::map<std::string, std::string, std::less<>> aliases_;
};

namespace detail {

inline RunnerFactory explicit_factory(ExplicitVariant variant) {
  return [variant](MethodParams& p, const SolverOptions& solver) -> MethodRunner {
    ExplicitMethod method;
    method.variant = variant;
    method.k = p.get<Index>("k").value_or(10);
    if (variant == ExplicitVariant::srrsi_reg) {
      method.alpha = p.get<double>("alpha").value_or(1.0);
      method.beta = p.get<double>("beta").value_or(1.0);
    }
    if (variant == ExplicitVariant::srrsi_delta) {
      method.delta1 = p.get<double>("delta1");
      method.delta2 = p.get<double>("delta2");
    }
    method.validate();
    ImputeOptions options;
    options.solver = solver;
    if (variant == ExplicitVariant::hresi) options.hresi_fallback = p.get<bool>("fallback").value_or(true);
    return [method, options](const MethodInput& in) {
      const SubspacePrior prior = build_prior(in.neighbor, method.k);
      const ExplicitResult r = impute_explicit_detailed(in.y, in.mask, prior, method, options);
      std::string status(to_string(r.solution.status));
      if (r.fell_back) status += "/fallback";
      return MethodOutput{r.imputed, status};
    };
  };
}

}  // namespace detail

inline MethodRegistry MethodRegistry::builtin() {
  MethodRegistry r;
  r.add_imputer("mean", [](MethodParams& p, const SolverOptions&) {
    const std::string scope = p.get<std::string>("scope").value_or("column");
    if (scope != "column" && scope != "global") throw ArgumentError("mean: scope must be column or global");
    return std::make_shared<const MeanFill>(scope == "column" ? MeanFill::Scope::column : MeanFill::Scope::global);
  });
  r.add_imputer("knn", [](MethodParams& p, const SolverOptions&) {
    return std::make_shared<const KnnImputer>(p.get<Index>("n_neighbors").value_or(5));
  });
  r.add_imputer("softimpute", [](MethodParams& p, const SolverOptions&) {
    SoftImpute::Options o;
    o.n_lambdas = p.get<int>("n_lambdas").value_or(o.n_lambdas);
    o.lambda_max_ratio = p.get<double>("lambda_max_ratio").value_or(o.lambda_max_ratio);
    o.lambda_min_ratio = p.get<double>("lambda_min_ratio").value_or(o.lambda_min_ratio);
    o.max_sweeps = p.get<int>("max_sweeps").value_or(o.max_sweeps);
    o.tolerance = p.get<double>("tolerance").value_or(o.tolerance);
    return std::make_shared<const SoftImpute>(o);
  });
  r.add_imputer("itersvd", [](MethodParams& p, const SolverOptions&) {
    return std::make_shared<const IterativeSvd>(p.get<Index>("rank").value_or(10), p.get<int>("max_iter").value_or(100),
                                                p.get<double>("tolerance").value_or(1e-5));
  });
  r.add_imputer("nnmin", [](MethodParams& p, const SolverOptions& solver) {
    return std::make_shared<const NNmin>(solver, p.get<double>("weight"));
  });
  for (auto v : {ExplicitVariant::hresi, ExplicitVariant::sresi, ExplicitVariant::srrsi_delta,
                 ExplicitVariant::srrsi_reg, ExplicitVariant::srwsi}) {
    r.add_runner(std::string(to_string(v)), detail::explicit_factory(v));
  }
  r.add_alias("srisi", "nnmin-h");
  return r;
}

}  // namespace satoris

#endif  // SATORIS_METHODS_HPP
