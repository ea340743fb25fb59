// demo - closed form, synthesized policy and simulated delivery for one instance

#include <cstdio>

#include "fogran/fogran.hpp"

int main() {
  using namespace fogran;
  const SystemParams p{0.5, 0.25, 0.25, 2};
  const SimScale scale{1'000'000, 1000.0, 100};

  const auto ndt = min_pipelined_ndt(p);
  std::printf("minimum pipelined NDT  %s (%s)\n", format_number(ndt.value).c_str(), classify_regime(p).label().c_str());
  std::printf("D2D threshold          %s\n", format_number(d2d_threshold(p).clamped).c_str());

  const auto policy = synthesize_serial_policy(p);
  std::printf("policy\n%s", dump(to_json(policy)).c_str());

  const auto serial = worst_case_report(policy, p, scale);
  const auto pipelined = worst_case_report(block_markov_convert(policy, scale), p);
  std::printf("serial     T=%lld  ndt=%s\n", static_cast<long long>(serial.total_symbols),
              format_number(serial.empirical_ndt).c_str());
  std::printf("pipelined  T=%lld  ndt=%s  gap=%s\n", static_cast<long long>(pipelined.total_symbols),
              format_number(pipelined.empirical_ndt).c_str(), format_number(pipelined.gap_to_closed_form).c_str());
}
