#ifndef COSMOS_TESTS_ANALYSIS_SUPPORT_H_
#define COSMOS_TESTS_ANALYSIS_SUPPORT_H_

// Eigen first: <resolv.h>, pulled in by httplib, defines a _res macro that
// collides with Eigen parameter names.
#include <Eigen/Dense>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "cosmos/analysis.h"
#include "cosmos/random.h"

namespace cosmos::testing {

using analysis::Geocoder;
using analysis::InteractionGraph;

// Stationary distribution solved directly: (I - d P^T) r = (1 - d)/N + d/N *
// (dangling mass), with dangling rows of P replaced by the uniform row.
inline std::vector<double> DensePageRank(const InteractionGraph& g, double d) {
  const int n = static_cast<int>(g.nodes.size());
  std::map<std::string, int> id;
  for (int i = 0; i < n; ++i) id[g.nodes[i]] = i;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges) {
    w(id[e.a], id[e.b]) += 1;
    w(id[e.b], id[e.a]) += 1;
  }
  Eigen::MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    const double deg = w.row(i).sum();
    p.row(i) = deg > 0 ? Eigen::RowVectorXd(w.row(i) / deg) : Eigen::RowVectorXd::Constant(n, 1.0 / n);
  }
  // Google matrix G = d P + (1 - d)/N 11^T; r = G^T r with sum r = 1.
  Eigen::MatrixXd g_t = (d * p + Eigen::MatrixXd::Constant(n, n, (1 - d) / n)).transpose();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - g_t;
  a.row(n - 1).setOnes();  // replace one redundant equation with the normalization
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd r = a.fullPivLu().solve(b);
  return {r.data(), r.data() + n};
}

inline InteractionGraph RandomGraph(size_t nodes, size_t edges, Rng& rng) {
  InteractionGraph g;
  for (size_t i = 0; i < nodes; ++i) g.nodes.push_back("p" + std::to_string(100 + i));
  for (size_t k = 0; k < edges; ++k) {
    size_t a = rng.Below(nodes), b = rng.Below(nodes);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    g.edges.push_back({g.nodes[a], g.nodes[b], 1900 + static_cast<int>(rng.Below(100)), "x university"});
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

struct MockNominatim {
  httplib::Server server;
  std::thread thread;
  std::atomic<int> hits{0};
  std::atomic<int> failures_left{0};
  int port = 0;

  MockNominatim() {
    server.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      if (failures_left > 0) {
        --failures_left;
        res.status = 503;
        return;
      }
      if (req.get_param_value("format") != "json") {
        res.status = 400;
        return;
      }
      const std::string q = req.get_param_value("q");
      if (q == "paris") {
        res.set_content(R"([{"lat":"48.85","lon":"2.35","display_name":"Paris"},{"lat":"33.66","lon":"-95.55"}])",
                        "application/json");
      } else if (q == "harvard university") {
        res.set_content(R"([{"lat":"42.3744","lon":"-71.1169"}])", "application/json");
      } else if (q == "broken") {
        res.set_content(R"([{"lat":"500","lon":"0"}])", "application/json");
      } else {
        res.set_content("[]", "application/json");
      }
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~MockNominatim() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/search"; }
};

// Virtual clock that only advances when the code under test sleeps.
struct FakeTime {
  std::chrono::steady_clock::time_point now{};
  std::vector<std::chrono::milliseconds> sleeps;
  Geocoder::Clock clock() {
    return [this] { return now; };
  }
  Geocoder::Sleep sleep() {
    return [this](std::chrono::milliseconds d) {
      sleeps.push_back(d);
      now += d;
    };
  }
};

}  // namespace cosmos::testing

#endif  // COSMOS_TESTS_ANALYSIS_SUPPORT_H_
