#include "gtsp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gtsp/fwk.hpp"
#include "gtsp/matching.hpp"
#include "gtsp/oracle.hpp"
#include "gtsp/parallel.hpp"

namespace gtsp {

using json = nlohmann::ordered_json;

UpperBound compute_upperbound(const CostMatrix& M, int workers) {
  DescentConfig cfg = DescentConfig::defaults(M.size(), M.symmetric());
  cfg.workers = workers;
  DescentTrace tr = descend(M, cfg);
  PatchedTour pt = patch_to_cycle(M, tr.final_perm);
  UpperBound best{std::move(tr), std::move(pt)};
  if (M.symmetric()) {
    cfg.forbid_symmetric_arcs = cfg.forbid_two_cycles = false;
    DescentTrace tr2 = descend(M, cfg);
    PatchedTour pt2 = patch_to_cycle(M, tr2.final_perm);
    if (pt2.value < best.patched.value) best = {std::move(tr2), std::move(pt2)};
  }
  return best;
}

Tour parse_tour(const std::string& text, int n) {
  std::vector<int> order;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad vertex '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("bad vertex '" + tok + "'");
    if (v < 1 || v > n) throw std::invalid_argument("vertex " + tok + " out of range 1.." + std::to_string(n));
    order.push_back(v - 1);
  }
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("tour lists " + std::to_string(order.size()) + " vertices, instance has " +
                                std::to_string(n));
  return Tour(std::move(order));
}

namespace {

json tour_json(const Tour& t) {
  json a = json::array();
  const Tour c = t.canonical();
  for (int v : c.order()) a.push_back(v + 1);
  return a;
}

std::string aav_of(Cost value, int n) { return Aav{value, n}.str(); }

json tour_block(const CostMatrix& M, const Tour& t) {
  const Cost v = tour_value(M, t);
  return json{{"tour", tour_json(t)}, {"value", v}, {"aav", aav_of(v, M.size())}};
}

struct Common {
  std::string file;
  std::string json_path;
  int workers = 0;
  long long seed = 0;
  bool timings = false;
};

class Runner {
 public:
  Runner(Common c, std::ostream& out) : c_(std::move(c)), out_(out) {}

  void load() {
    M_ = std::make_unique<CostMatrix>(load_matrix_file(c_.file));
    workers_ = resolve_workers(c_.workers);
    rep_["instance"] = std::filesystem::path(c_.file).stem().string();
    rep_["n"] = M_->size();
    rep_["symmetric"] = M_->symmetric();
    rep_["seed"] = c_.seed;
  }

  const CostMatrix& M() const { return *M_; }

  template <class F>
  auto timed(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timings_[stage] = s;
    return r;
  }

  UpperBound upperbound() {
    UpperBound ub = timed("upperbound", [&] { return compute_upperbound(M(), workers_); });
    rep_["assignment"] = {{"value", ub.trace.final_value},
                          {"derangement", ub.trace.final_perm.to_string()},
                          {"steps", ub.trace.steps.size()}};
    rep_["upperbound"] = tour_block(M(), ub.patched.tour);
    return ub;
  }

  void print_tour(const std::string& label, const Tour& t) {
    const Cost v = tour_value(M(), t);
    out_ << label << ": (" << t.canonical().to_string() << ") value " << v << " aav " << aav_of(v, M().size())
         << '\n';
  }

  void finish(const Tour& result) {
    rep_["result"] = tour_block(M(), result);
    if (c_.timings) rep_["timings"] = timings_;
    if (!c_.json_path.empty()) {
      std::ofstream f(c_.json_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + c_.json_path);
      f << rep_.dump(2) << '\n';
    }
  }

  json& report() { return rep_; }
  int workers() const { return workers_; }

 private:
  Common c_;
  std::ostream& out_;
  std::unique_ptr<CostMatrix> M_;
  int workers_ = 1;
  json rep_;
  json timings_ = json::object();
};

struct InstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gtsp: TSP solver built on derangement descent, matching neighborhoods and average-arc-value search"};
  app.fallthrough();
  app.require_subcommand(1);
  Common c;
  app.add_option("--json", c.json_path, "write the run report as JSON");
  app.add_option("--workers", c.workers, "concurrent workers (default: GTSP_WORKERS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "seed echoed in the report");
  app.add_flag("--timings", c.timings, "include wall-clock timings in the JSON report");

  auto* a_cmd = app.add_subcommand("assignment", "minimum-value derangement by descent");
  a_cmd->add_option("file", c.file)->required();
  auto* u_cmd = app.add_subcommand("upperbound", "descent followed by patching");
  u_cmd->add_option("file", c.file)->required();

  auto* s_cmd = app.add_subcommand("solve", "full pipeline");
  s_cmd->add_option("file", c.file)->required();
  std::string mode = "matching";
  int k = 10;
  bool with_oracle = false, exhaustive = false;
  s_cmd->add_option("--mode", mode)->check(CLI::IsMember({"matching", "exact", "h1", "h2"}));
  s_cmd->add_option("--k", k, "BEST table depth for h1")->check(CLI::PositiveNumber);
  s_cmd->add_flag("--oracle", with_oracle, "compare with an exact oracle (n <= 20)");
  s_cmd->add_flag("--exhaustive", exhaustive, "matching mode: full-length cycles and relaxed per-cycle ceiling");

  auto* o_cmd = app.add_subcommand("oracle", "exact reference solvers");
  o_cmd->add_option("file", c.file)->required();
  std::string method = "dp";
  o_cmd->add_option("--method", method)->check(CLI::IsMember({"brute", "dp", "hungarian"}));

  auto* v_cmd = app.add_subcommand("verify", "evaluate a tour");
  v_cmd->add_option("file", c.file)->required();
  std::string tour_text;
  bool canonical = false;
  v_cmd->add_option("tour", tour_text, "comma separated 1-based vertices")->required();
  v_cmd->add_flag("--canonical", canonical, "also print the instance in canonical form");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Runner r(c, out);
    try {
      r.load();
    } catch (const ParseError& e) {
      throw InstanceError(e.what());
    } catch (const std::runtime_error& e) {
      throw InstanceError(e.what());
    }
    const CostMatrix& M = r.M();
    const int n = M.size();

    if (a_cmd->parsed()) {
      r.report()["command"] = "assignment";
      DescentConfig cfg = DescentConfig::defaults(n, false);
      cfg.workers = r.workers();
      const DescentTrace tr = r.timed("descent", [&] { return descend(M, cfg); });
      out << "derangement: " << tr.final_perm.to_string() << '\n'
          << "value: " << tr.final_value << '\n'
          << "trace length: " << tr.steps.size() << '\n';
      json steps = json::array();
      for (const auto& s : tr.steps) steps.push_back({{"cycle", s.cycle.to_string()}, {"value", s.cycle.value}, {"after", s.value_after}});
      r.report()["assignment"] = {{"value", tr.final_value}, {"derangement", tr.final_perm.to_string()}, {"steps", steps}};
      if (!tr.final_perm.is_single_cycle()) {
        if (!c.json_path.empty()) {
          r.report()["result"] = nullptr;
          std::ofstream f(c.json_path, std::ios::binary);
          f << r.report().dump(2) << '\n';
        }
        return kExitOk;
      }
      r.finish(Tour::from_successors(tr.final_perm.images()));
      return kExitOk;
    }

    if (u_cmd->parsed()) {
      r.report()["command"] = "upperbound";
      const UpperBound ub = r.upperbound();
      out << "assignment value: " << ub.trace.final_value << '\n';
      r.print_tour("upper bound", ub.patched.tour);
      r.finish(ub.patched.tour);
      return kExitOk;
    }

    if (o_cmd->parsed()) {
      r.report()["command"] = "oracle";
      oracle::OracleResult res;
      if (method == "brute") {
        if (n > oracle::kBruteForceMax) throw std::invalid_argument("brute force needs n <= 11");
        res = oracle::brute_force_tour(M);
      } else if (method == "dp") {
        if (n > oracle::kHeldKarpMax) throw std::invalid_argument("held-karp needs n <= 20");
        res = oracle::held_karp(M);
      } else {
        res = oracle::assignment_optimal(M);
      }
      r.report()["oracle"] = {{"method", method}, {"value", res.value}};
      out << method << " optimum: " << res.value << '\n';
      if (method == "hungarian") {
        const Permutation p(res.witness);
        out << "derangement: " << p.to_string() << '\n';
        r.report()["oracle"]["derangement"] = p.to_string();
        if (!c.json_path.empty()) {
          std::ofstream f(c.json_path, std::ios::binary);
          f << r.report().dump(2) << '\n';
        }
        return kExitOk;
      }
      const Tour t(res.witness);
      r.print_tour("optimal tour", t);
      r.finish(t);
      return kExitOk;
    }

    if (v_cmd->parsed()) {
      r.report()["command"] = "verify";
      Tour t = [&] {
        try {
          return parse_tour(tour_text, n);
        } catch (const std::invalid_argument& e) {
          throw CLI::ValidationError("tour", e.what());
        }
      }();
      const Cost v = tour_value(M, t);
      out << "value " << v << '\n' << "aav " << aav_of(v, n) << '\n';
      if (canonical) out << to_text(M);
      r.finish(t);
      return kExitOk;
    }

    // solve
    r.report()["command"] = "solve";
    r.report()["config"] = {{"mode", mode}, {"k", k}, {"exhaustive", exhaustive}, {"oracle", with_oracle}};
    const UpperBound ub = r.upperbound();
    out << "assignment value: " << ub.trace.final_value << '\n';
    r.print_tour("upper bound", ub.patched.tour);
    Tour result = ub.patched.tour;
    if (mode == "matching") {
      RefineConfig rc;
      rc.exhaustive = exhaustive;
      rc.workers = r.workers();
      const RefineResult rr = r.timed("refine", [&] { return refine(M, ub.patched.tour, rc); });
      result = rr.tour;
      json block = tour_block(M, rr.tour);
      block["history"] = rr.history;
      block["a"] = rr.acceptable;
      block["t"] = rr.two_circuit;
      block["p"] = rr.points;
      r.report()["refine"] = block;
      out << "refine history:";
      for (Cost h : rr.history) out << ' ' << h;
      out << "\nlast step: a=" << rr.acceptable << " t=" << rr.two_circuit << " p=" << rr.points << '\n';
    } else {
      FwkOptions fo;
      fo.workers = r.workers();
      const FwkResult fr = r.timed("fwk", [&] {
        if (mode == "exact") return fwk_exact(M, ub.patched.tour, fo);
        if (mode == "h1") return fwk_heuristic1(M, ub.patched.tour, k);
        return fwk_heuristic2(M, ub.patched.tour);
      });
      result = fr.tour;
      json block = tour_block(M, fr.tour);
      block["mode"] = mode;
      block["bound_history"] = fr.stats.bound_history;
      block["level_records"] = fr.stats.level_records;
      block["archive_size"] = fr.stats.archive_size;
      r.report()["fwk"] = block;
      out << "fwk bound history:";
      for (Cost h : fr.stats.bound_history) out << ' ' << h;
      out << "\narchive size: " << fr.stats.archive_size << '\n';
    }
    r.print_tour("result", result);
    if (with_oracle) {
      if (n > oracle::kHeldKarpMax) {
        out << "oracle skipped: n > " << oracle::kHeldKarpMax << '\n';
      } else {
        const auto o = r.timed("oracle", [&] { return n <= 9 ? oracle::brute_force_tour(M) : oracle::held_karp(M); });
        const Cost rv = tour_value(M, result);
        r.report()["oracle"] = {{"method", o.method}, {"value", o.value}, {"optimal", rv == o.value}};
        out << "oracle (" << o.method << "): " << o.value << (rv == o.value ? " optimal" : " gap " + std::to_string(rv - o.value)) << '\n';
      }
    }
    r.finish(result);
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InstanceError& e) {
    err << "instance error: " << e.what() << '\n';
    return kExitInstance;
  } catch (const InvariantError& e) {
    err << "internal invariant failure: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace gtsp
