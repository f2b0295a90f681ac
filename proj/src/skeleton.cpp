#include "hsflow/skeleton.hpp"

#include "hsflow/matexp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace hsflow {

namespace {

constexpr double kFixedPointTol = 1e-13;
constexpr int kMaxSweeps = 200;
constexpr double kStageDriftTol = 1e-6;

Matrix apply_motion(MotionMap motion, const Matrix& xi) {
  return motion == MotionMap::Exponential ? expm(xi) : cayley(xi);
}

}  // namespace

const Matrix& FieldView::operator()(const std::string& label) const {
  if (frozen_) {
    auto it = frozen_->find(label);
    if (it != frozen_->end()) return it->second;
  }
  if (aux_) {
    auto it = aux_->find(label);
    if (it != aux_->end()) return it->second;
  }
  throw std::logic_error("transition rule reads unknown field '" + label +
                         "'");
}

TransitionRule linear_rule(std::string to, std::string from,
                           std::vector<std::pair<double, std::string>> terms) {
  std::vector<std::string> reads;
  reads.reserve(terms.size());
  for (const auto& [coef, label] : terms) {
    (void)coef;
    reads.push_back(label);
  }
  auto combine = [terms = std::move(terms)](const FieldView& f) {
    Matrix acc = f.zero();
    for (const auto& [coef, label] : terms) acc += coef * f(label);
    return acc;
  };
  return TransitionRule{std::move(to), std::move(from), std::move(reads),
                        std::move(combine)};
}

FixedPointError::FixedPointError(int iterations_, double residual_)
    : std::runtime_error("fixed-point iteration failed to converge after " +
                         std::to_string(iterations_) + " sweeps (residual " +
                         std::to_string(residual_) + ")"),
      iterations(iterations_),
      residual(residual_) {}

ManifoldDriftError::ManifoldDriftError(std::string vertex_, double distance_)
    : std::runtime_error("stage '" + vertex_ + "' left the manifold (drift " +
                         std::to_string(distance_) + ")"),
      vertex(std::move(vertex_)),
      distance(distance_) {}

void validate_skeleton(Skeleton& skel) {
  const auto& t = skel.tree;
  if (t.vertices.empty()) {
    throw std::invalid_argument("skeleton: no vertices");
  }
  std::set<std::string> vset(t.vertices.begin(), t.vertices.end());
  if (vset.size() != t.vertices.size()) {
    throw std::invalid_argument("skeleton: duplicate vertex labels");
  }
  if (!vset.count(t.initial) || !vset.count(t.final_vertex)) {
    throw std::invalid_argument(
        "skeleton: initial/final must be members of the vertex set");
  }
  if (t.edges.empty()) {
    throw std::invalid_argument("skeleton: at least one edge is required");
  }
  if (t.initial == t.final_vertex) {
    throw std::invalid_argument("skeleton: initial and final must differ");
  }
  if (t.edges.size() + 1 != t.vertices.size()) {
    throw std::invalid_argument(
        "skeleton: a tree needs exactly |V|-1 edges, got " +
        std::to_string(t.edges.size()));
  }
  // connectivity by BFS
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : t.edges) {
    if (!vset.count(a) || !vset.count(b)) {
      throw std::invalid_argument("skeleton: edge touches unknown vertex");
    }
    if (a == b) throw std::invalid_argument("skeleton: self-loop edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> seen{t.initial};
  std::deque<std::string> queue{t.initial};
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (const auto& w : adj[v]) {
      if (seen.insert(w).second) queue.push_back(w);
    }
  }
  if (seen.size() != vset.size()) {
    throw std::invalid_argument("skeleton: stage tree is not connected");
  }
  // exactly one rule per edge
  if (skel.rules.size() != t.edges.size()) {
    throw std::invalid_argument("skeleton: need exactly one rule per edge");
  }
  auto key = [](const std::string& a, const std::string& b) {
    return a < b ? a + "|" + b : b + "|" + a;
  };
  std::set<std::string> edge_keys;
  for (const auto& [a, b] : t.edges) edge_keys.insert(key(a, b));
  std::set<std::string> rule_keys;
  for (const auto& r : skel.rules) {
    if (!edge_keys.count(key(r.to, r.from))) {
      throw std::invalid_argument("skeleton: rule (" + r.to + "," + r.from +
                                  ") matches no edge");
    }
    if (!rule_keys.insert(key(r.to, r.from)).second) {
      throw std::invalid_argument("skeleton: duplicate rule for edge (" +
                                  r.to + "," + r.from + ")");
    }
  }
  // label hygiene and used vertices
  std::set<std::string> aux_names;
  if (skel.auxiliary) {
    for (const auto& n : skel.auxiliary->names) {
      if (vset.count(n)) {
        throw std::invalid_argument(
            "skeleton: auxiliary label '" + n + "' clashes with a vertex");
      }
      aux_names.insert(n);
    }
  }
  std::set<std::string> used;
  auto note_reads = [&](const std::vector<std::string>& reads) {
    for (const auto& label : reads) {
      if (vset.count(label)) {
        used.insert(label);
      } else if (!aux_names.count(label)) {
        throw std::invalid_argument("skeleton: rule reads unknown label '" +
                                    label + "'");
      }
    }
  };
  for (const auto& r : skel.rules) note_reads(r.reads);
  if (skel.auxiliary) note_reads(skel.auxiliary->reads);
  if (!skel.used_vertices.empty()) {
    for (const auto& u : used) {
      if (!skel.used_vertices.count(u)) {
        throw std::invalid_argument(
            "skeleton: declared used_vertices misses '" + u + "'");
      }
    }
  }
  skel.used_vertices = used;
}

Skeleton flip_rule(const Skeleton& skel, std::size_t idx) {
  if (idx >= skel.rules.size()) {
    throw std::invalid_argument("flip_rule: rule index out of range");
  }
  Skeleton out = skel;
  TransitionRule& r = out.rules[idx];
  std::swap(r.to, r.from);
  auto inner = r.combine;
  r.combine = [inner](const FieldView& f) { return Matrix(-inner(f)); };
  return out;
}

namespace {

// Tree orientation rooted at the initial vertex plus the per-vertex oriented
// rule (sign -1 when the stored rule points towards the parent).
struct Orientation {
  std::vector<std::string> bfs_order;  // excludes the root
  std::map<std::string, std::string> parent;
  std::map<std::string, const TransitionRule*> rule;
  std::map<std::string, double> sign;
};

Orientation orient(const Skeleton& skel) {
  Orientation o;
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : skel.tree.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> seen{skel.tree.initial};
  std::deque<std::string> queue{skel.tree.initial};
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (const auto& w : adj[v]) {
      if (!seen.insert(w).second) continue;
      o.parent[w] = v;
      o.bfs_order.push_back(w);
      queue.push_back(w);
    }
  }
  for (const auto& r : skel.rules) {
    if (o.parent.count(r.to) && o.parent.at(r.to) == r.from) {
      o.rule[r.to] = &r;
      o.sign[r.to] = 1.0;
    } else {
      o.rule[r.from] = &r;
      o.sign[r.from] = -1.0;
    }
  }
  return o;
}

// Order in which stages can be computed so that every frozen field a rule
// reads is already known. Empty when no such order exists (implicit method).
std::vector<std::string> explicit_order(const Skeleton& skel,
                                        const Orientation& o) {
  if (skel.auxiliary) return {};
  std::set<std::string> ready{skel.tree.initial};
  std::vector<std::string> order;
  std::vector<std::string> pending = o.bfs_order;
  bool progress = true;
  while (!pending.empty() && progress) {
    progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      const std::string& v = *it;
      bool ok = ready.count(o.parent.at(v)) > 0;
      if (ok) {
        for (const auto& label : o.rule.at(v)->reads) {
          if (!ready.count(label)) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        order.push_back(v);
        ready.insert(v);
        it = pending.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
  }
  return pending.empty() ? order : std::vector<std::string>{};
}

void check_stage(const HomogeneousSpace& space, const std::string& vertex,
                 const Matrix& x) {
  const double drift = space.membership(x);
  if (!(drift <= kStageDriftTol)) {
    throw ManifoldDriftError(vertex, drift);
  }
}

}  // namespace

StepStats step_detailed(const Skeleton& skel_in, const HomogeneousSpace& space,
                        const IsotropyChoice& nu, const Matrix& x0) {
  Skeleton skel = skel_in;  // validation fills used_vertices
  validate_skeleton(skel);
  ensure_finite(x0, "step: x0");
  check_stage(space, skel.tree.initial, x0);

  const int dim = nu.tag.ambient_dim();
  const Orientation o = orient(skel);

  std::map<std::string, Matrix> stages;
  std::map<std::string, Matrix> frozen;
  std::map<std::string, Matrix> aux;
  stages.emplace(skel.tree.initial, x0);

  const std::vector<std::string> topo = explicit_order(skel, o);
  if (!topo.empty() || (o.bfs_order.empty() && !skel.auxiliary)) {
    // Explicit path: single interleaved sweep in dependency order.
    if (skel.used_vertices.count(skel.tree.initial)) {
      frozen.emplace(skel.tree.initial, nu.value(x0));
    }
    for (const auto& v : topo) {
      FieldView view(&frozen, nullptr, dim);
      const Matrix tau = o.sign.at(v) * o.rule.at(v)->combine(view);
      Matrix x = space.act(apply_motion(skel.motion, tau),
                           stages.at(o.parent.at(v)));
      check_stage(space, v, x);
      if (skel.used_vertices.count(v)) frozen.emplace(v, nu.value(x));
      stages.emplace(v, std::move(x));
    }
    return StepStats{stages.at(skel.tree.final_vertex), 1, 0.0, true};
  }

  // Implicit path: fixed-point iteration on the frozen fields (and the
  // auxiliary block), seeded at nu(x0).
  const Matrix nu0 = nu.value(x0);
  for (const auto& v : skel.used_vertices) frozen[v] = nu0;
  if (skel.auxiliary) {
    FieldView fview(&frozen, nullptr, dim);
    aux = skel.auxiliary->seed(fview);
  }

  auto sweep_stages = [&]() {
    FieldView view(&frozen, &aux, dim);
    for (const auto& v : o.bfs_order) {
      const Matrix tau = o.sign.at(v) * o.rule.at(v)->combine(view);
      Matrix x = space.act(apply_motion(skel.motion, tau),
                           stages.at(o.parent.at(v)));
      check_stage(space, v, x);
      stages.insert_or_assign(v, std::move(x));
    }
  };

  double delta = 0.0;
  for (int iter = 1; iter <= kMaxSweeps; ++iter) {
    sweep_stages();
    delta = 0.0;
    for (const auto& v : skel.used_vertices) {
      Matrix next = nu.value(stages.at(v));
      delta = std::max(delta, (next - frozen.at(v)).norm());
      frozen.at(v) = std::move(next);
    }
    if (skel.auxiliary) {
      FieldView fview(&frozen, nullptr, dim);
      FieldView aview(nullptr, &aux, dim);
      auto next = skel.auxiliary->update(fview, aview);
      for (const auto& name : skel.auxiliary->names) {
        delta = std::max(delta, (next.at(name) - aux.at(name)).norm());
      }
      aux = std::move(next);
    }
    if (delta <= kFixedPointTol) {
      sweep_stages();  // stages consistent with the converged fields
      return StepStats{stages.at(skel.tree.final_vertex), iter, delta, false};
    }
  }
  throw FixedPointError(kMaxSweeps, delta);
}

Matrix step(const Skeleton& skel, const HomogeneousSpace& space,
            const IsotropyChoice& nu, const Matrix& x0) {
  return step_detailed(skel, space, nu, x0).x1;
}

Skeleton from_butcher(const Matrix& a, const Vector& b) {
  ensure_square(a, "from_butcher");
  const int s = static_cast<int>(a.rows());
  if (s < 1 || b.size() != s) {
    throw std::invalid_argument("from_butcher: need s >= 1 and |b| = s");
  }
  Skeleton skel;
  skel.name = "butcher" + std::to_string(s);
  skel.tree.initial = "initial";
  skel.tree.final_vertex = "final";
  skel.tree.vertices = {"initial"};
  auto stage_label = [](int i) { return std::to_string(i + 1); };
  for (int i = 0; i < s; ++i) {
    skel.tree.vertices.push_back(stage_label(i));
    skel.tree.edges.emplace_back("initial", stage_label(i));
    std::vector<std::pair<double, std::string>> terms;
    for (int j = 0; j < s; ++j) {
      if (a(i, j) != 0.0) terms.emplace_back(a(i, j), stage_label(j));
    }
    skel.rules.push_back(linear_rule(stage_label(i), "initial", terms));
  }
  skel.tree.vertices.push_back("final");
  skel.tree.edges.emplace_back("initial", "final");
  std::vector<std::pair<double, std::string>> bterms;
  for (int j = 0; j < s; ++j) {
    if (b(j) != 0.0) bterms.emplace_back(b(j), stage_label(j));
  }
  skel.rules.push_back(linear_rule("final", "initial", bterms));
  validate_skeleton(skel);
  return skel;
}

namespace {

Skeleton star_tree(std::string name, std::vector<std::string> stages) {
  Skeleton skel;
  skel.name = std::move(name);
  skel.tree.initial = "initial";
  skel.tree.final_vertex = "final";
  skel.tree.vertices = {"initial"};
  for (auto& s : stages) skel.tree.vertices.push_back(std::move(s));
  skel.tree.vertices.push_back("final");
  return skel;
}

Skeleton make_euler_forward() {
  Skeleton skel = star_tree("euler_forward", {});
  skel.tree.edges.emplace_back("initial", "final");
  skel.rules.push_back(linear_rule("final", "initial", {{1.0, "initial"}}));
  return skel;
}

Skeleton make_euler_backward() {
  Skeleton skel = star_tree("euler_backward", {});
  skel.tree.edges.emplace_back("initial", "final");
  skel.rules.push_back(linear_rule("final", "initial", {{1.0, "final"}}));
  return skel;
}

Skeleton make_trapezoidal() {
  Skeleton skel = star_tree("trapezoidal", {});
  skel.tree.edges.emplace_back("initial", "final");
  skel.rules.push_back(linear_rule("final", "initial",
                                   {{0.5, "initial"}, {0.5, "final"}}));
  return skel;
}

Skeleton make_implicit_midpoint() {
  Skeleton skel = star_tree("implicit_midpoint", {"star"});
  skel.tree.edges.emplace_back("initial", "star");
  skel.tree.edges.emplace_back("star", "final");
  skel.rules.push_back(linear_rule("star", "initial", {{0.5, "star"}}));
  skel.rules.push_back(linear_rule("final", "star", {{0.5, "star"}}));
  return skel;
}

Skeleton make_cf4() {
  Skeleton skel = star_tree("cf4", {"1", "2", "3", "4'"});
  auto edge = [&](const char* a, const char* b) {
    skel.tree.edges.emplace_back(a, b);
  };
  edge("initial", "1");
  edge("initial", "2");
  edge("1", "3");
  edge("initial", "4'");
  edge("4'", "final");
  const double c = 1.0 / 12.0;
  skel.rules.push_back(linear_rule("1", "initial", {{0.5, "initial"}}));
  skel.rules.push_back(linear_rule("2", "initial", {{0.5, "1"}}));
  skel.rules.push_back(
      linear_rule("3", "1", {{-0.5, "initial"}, {1.0, "2"}}));
  skel.rules.push_back(linear_rule(
      "4'", "initial",
      {{3 * c, "initial"}, {2 * c, "1"}, {2 * c, "2"}, {-c, "3"}}));
  skel.rules.push_back(linear_rule(
      "final", "4'",
      {{-c, "initial"}, {2 * c, "1"}, {2 * c, "2"}, {3 * c, "3"}}));
  return skel;
}

Skeleton make_rkmk3() {
  Skeleton skel = star_tree("rkmk3", {"1", "2"});
  skel.tree.edges.emplace_back("initial", "1");
  skel.tree.edges.emplace_back("initial", "2");
  skel.tree.edges.emplace_back("initial", "final");
  skel.rules.push_back(linear_rule("1", "initial", {{0.5, "initial"}}));
  skel.rules.push_back(
      linear_rule("2", "initial", {{-1.0, "initial"}, {2.0, "1"}}));
  TransitionRule r;
  r.to = "final";
  r.from = "initial";
  r.reads = {"initial", "1", "2"};
  r.combine = [](const FieldView& f) {
    const Matrix& f0 = f("initial");
    const Matrix& f1 = f("1");
    const Matrix& f2 = f("2");
    return Matrix((f0 + 4.0 * f1 + f2) / 6.0 +
                  commutator(4.0 * f1 + f2, f0) / 36.0);
  };
  skel.rules.push_back(std::move(r));
  return skel;
}

Skeleton make_rkmk4() {
  Skeleton skel = star_tree("rkmk4", {"1", "2", "3"});
  skel.tree.edges.emplace_back("initial", "1");
  skel.tree.edges.emplace_back("initial", "2");
  skel.tree.edges.emplace_back("initial", "3");
  skel.tree.edges.emplace_back("initial", "final");
  skel.rules.push_back(linear_rule("1", "initial", {{0.5, "initial"}}));
  TransitionRule r2;
  r2.to = "2";
  r2.from = "initial";
  r2.reads = {"initial", "1"};
  r2.combine = [](const FieldView& f) {
    return Matrix(0.5 * f("1") - commutator(f("initial"), f("1")) / 8.0);
  };
  skel.rules.push_back(std::move(r2));
  skel.rules.push_back(linear_rule("3", "initial", {{1.0, "2"}}));
  TransitionRule rf;
  rf.to = "final";
  rf.from = "initial";
  rf.reads = {"initial", "1", "2", "3"};
  rf.combine = [](const FieldView& f) {
    const Matrix& f0 = f("initial");
    const Matrix& f3 = f("3");
    return Matrix((f0 + 2.0 * (f("1") + f("2")) + f3) / 6.0 -
                  commutator(f0, f3) / 12.0);
  };
  skel.rules.push_back(std::move(rf));
  return skel;
}

Skeleton make_cg3() {
  // Chained Crouch-Grossman tableau: c = (0, 3/4, 17/24),
  // a21 = 3/4, a31 = 119/216, a32 = 17/108, b = (13/51, -2/3, 24/17).
  Skeleton skel = star_tree("cg3", {"1", "2'", "2", "3''", "3'"});
  auto edge = [&](const char* a, const char* b) {
    skel.tree.edges.emplace_back(a, b);
  };
  edge("initial", "1");
  edge("initial", "2'");
  edge("2'", "2");
  edge("initial", "3''");
  edge("3''", "3'");
  edge("3'", "final");
  skel.rules.push_back(
      linear_rule("1", "initial", {{3.0 / 4.0, "initial"}}));
  skel.rules.push_back(
      linear_rule("2'", "initial", {{119.0 / 216.0, "initial"}}));
  skel.rules.push_back(linear_rule("2", "2'", {{17.0 / 108.0, "1"}}));
  skel.rules.push_back(
      linear_rule("3''", "initial", {{13.0 / 51.0, "initial"}}));
  skel.rules.push_back(linear_rule("3'", "3''", {{-2.0 / 3.0, "1"}}));
  skel.rules.push_back(linear_rule("final", "3'", {{24.0 / 17.0, "2"}}));
  return skel;
}

Skeleton make_gauss4() {
  Skeleton skel;
  skel.name = "gauss4";
  skel.tree.initial = "initial";
  skel.tree.final_vertex = "final";
  skel.tree.vertices = {"initial", "center", "final", "+", "-"};
  skel.tree.edges = {{"initial", "center"},
                     {"center", "final"},
                     {"-", "center"},
                     {"+", "center"}};
  const double s6 = std::sqrt(3.0) / 6.0;
  skel.rules.push_back(linear_rule("center", "initial",
                                   {{0.25, "bar+"}, {0.25, "bar-"}}));
  skel.rules.push_back(linear_rule("final", "center",
                                   {{0.25, "bar+"}, {0.25, "bar-"}}));
  skel.rules.push_back(linear_rule("center", "-", {{-s6, "bar+"}}));
  skel.rules.push_back(linear_rule("center", "+", {{s6, "bar-"}}));

  AuxiliarySystem aux;
  aux.names = {"bar+", "bar-"};
  aux.reads = {"+", "-"};
  aux.seed = [](const FieldView& f) {
    return std::map<std::string, Matrix>{{"bar+", f("+")}, {"bar-", f("-")}};
  };
  // 1/(4 sqrt 3): the coefficient that satisfies the third-order Magnus
  // condition for the Gauss nodes; the method is time-symmetric, so its
  // order is then four.
  const double s4 = std::sqrt(3.0) / 12.0;
  aux.update = [s4](const FieldView& f, const FieldView& a) {
    std::map<std::string, Matrix> next;
    next.emplace("bar+",
                 Matrix(f("+") + s4 * commutator(a("bar-"), f("+"))));
    next.emplace("bar-",
                 Matrix(f("-") - s4 * commutator(a("bar+"), f("-"))));
    return next;
  };
  skel.auxiliary = std::move(aux);
  return skel;
}

}  // namespace

Skeleton named_skeleton(const std::string& name) {
  Skeleton skel;
  if (name == "euler_forward") {
    skel = make_euler_forward();
  } else if (name == "euler_backward") {
    skel = make_euler_backward();
  } else if (name == "trapezoidal") {
    skel = make_trapezoidal();
  } else if (name == "implicit_midpoint") {
    skel = make_implicit_midpoint();
  } else if (name == "rkmk3") {
    skel = make_rkmk3();
  } else if (name == "rkmk4") {
    skel = make_rkmk4();
  } else if (name == "cg3") {
    skel = make_cg3();
  } else if (name == "cf4") {
    skel = make_cf4();
  } else if (name == "gauss4") {
    skel = make_gauss4();
  } else {
    std::ostringstream msg;
    msg << "unknown skeleton '" << name << "'; valid names:";
    for (const auto& n : skeleton_names()) msg << " " << n;
    throw std::invalid_argument(msg.str());
  }
  validate_skeleton(skel);
  return skel;
}

std::vector<std::string> skeleton_names() {
  return {"euler_forward", "euler_backward", "trapezoidal",
          "implicit_midpoint", "rkmk3", "rkmk4", "cg3", "cf4", "gauss4"};
}

}  // namespace hsflow
