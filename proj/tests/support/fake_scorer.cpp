// Stand-in plugin for the external scorer tests. The first argument picks a
// behavior; "ok" scores with a pattern exactly like the in-process scorer.

#include <chrono>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "piex/classifier.h"
#include "piex/io.h"

namespace {

void say(const nlohmann::json &j) { std::cout << j.dump() << std::endl; }

void handshake() { say({{"protocol", "pi-explain/1"}}); }

}  // namespace

int main(int argc, char **argv) {
  const std::string mode = argc > 1 ? argv[1] : "ok";
  const std::string spec = argc > 2 ? argv[2] : "N-C@0.1/0.9";

  if (mode == "bad-handshake") {
    say({{"protocol", "pi-explain/0"}});
    return 0;
  }
  if (mode == "silent-exit")
    return 0;
  if (mode == "hang-handshake") {
    std::this_thread::sleep_for(std::chrono::seconds(30));
    return 0;
  }
  handshake();

  piex::PatternScorer scorer = piex::PatternScorer::parse(spec);
  std::vector<std::pair<std::string, double>> held;
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto req = nlohmann::json::parse(line);
    const std::string id = req.at("id").get<std::string>();
    if (mode == "ok" || mode == "reverse") {
      const piex::LabeledGraph g = piex::parse_labeled_graph(req.at("graph").dump());
      const double s = scorer.score(std::span(&g, 1)).front();
      if (mode == "ok") {
        say({{"id", id}, {"score", s}});
      } else {
        held.emplace_back(id, s);
        if (held.size() == 2) {
          say({{"id", held[1].first}, {"score", held[1].second}});
          say({{"id", held[0].first}, {"score", held[0].second}});
          held.clear();
        }
      }
    } else if (mode == "malformed") {
      std::cout << "this is not json" << std::endl;
    } else if (mode == "missing-id") {
      say({{"score", 0.5}});
    } else if (mode == "wrong-id") {
      say({{"id", "x" + id}, {"score", 0.5}});
    } else if (mode == "out-of-range") {
      say({{"id", id}, {"score", 1.5}});
    } else if (mode == "error-record") {
      say({{"id", nullptr}, {"error", "cannot score"}});
    } else if (mode == "timeout") {
      std::this_thread::sleep_for(std::chrono::seconds(30));
    } else if (mode == "die") {
      return 3;
    }
  }
  for (const auto &[id, s] : held)
    say({{"id", id}, {"score", s}});
  return 0;
}
