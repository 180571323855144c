// Serves one episode on a loopback port and drives it with a client that
// answers every observation with a small skill program, then compares with
// the oracle on the same episode.

#include <iostream>
#include <string>

#include "dynahoi/agents.hpp"
#include "dynahoi/server.hpp"

using namespace dynahoi;

namespace {

// Moves toward the last seen target position and closes the hand once near.
std::string program_for(const ImageAndState& m, const Camera& cam) {
  const auto seen = observed_target(cam, m.observation);
  const Vec3 palm = m.observation.hand.palm;
  if (!seen) return R"({"action_sequence":[{"skill":"WAIT","duration":1}]})";
  if (distance(*seen, palm) < kLocThreshold) {
    return R"({"action_sequence":[{"skill":"GRASP","params":{"joint_targets":)" + json(std::vector<double>(15, 1.5)).dump() +
           R"(},"duration":1}]})";
  }
  return R"({"action_sequence":[{"skill":"APPROACH","params":{"target":"object","target_point":)" + json(*seen).dump() +
         R"(,"speed":2.0},"duration":1,"terminate_if":"palm within 0.3 m"}]})";
}

}  // namespace

int main() {
  CatalogEpisodeFactory factory;
  factory.seed = 7;
  Server server(factory);
  const std::uint16_t port = server.listen({"127.0.0.1", 0});
  server.start(1);

  const EpisodeConfig cfg = factory(StartEpisode{0, "line_slow", 40, 1});
  const StartEpisode start{0, "line_slow", cfg.frames, 1};
  auto conn = connect_to({"127.0.0.1", port});
  const MetricsReport wire = run_client_episode(*conn, start, [&](const ImageAndState& m) {
    ActionData a;
    a.program = program_for(m, cfg.camera);
    return a;
  });
  server.wait();

  const MetricsReport gt = evaluate(run_gt_episode(cfg));
  std::cout << "skill client: s_loc=" << wire.s_loc << " e_loc=" << wire.e_loc << " s_gra=" << wire.s_gra << "\n";
  std::cout << "oracle:       s_loc=" << gt.s_loc << " e_loc=" << gt.e_loc << " s_gra=" << gt.s_gra << "\n";
  return 0;
}
