#include "commands.hpp"
#include "common.hpp"
#include "tradenet/io/market_file.hpp"
#include "tradenet/topology.hpp"

namespace tradenet::cli {

void RegisterGenerate(CLI::App& app, Action& action) {
  struct Flags {
    CommonOptions common;
    TopologyFlags topology;
    std::string file = "market.json";
    std::string init_offers;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* cmd = app.add_subcommand("generate", "Generate a random market file");
  AddTopologyOptions(*cmd, flags->topology);
  cmd->add_option("--seed", flags->common.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", flags->common.out,
                  "Output directory (default: $TRADENET_OUT, else ./tradenet-out)");
  cmd->add_option("--file", flags->file, "File name inside the output directory")
      ->capture_default_str();
  cmd->add_option("--init-offers", flags->init_offers,
                  "Also store initial offers drawn uniformly from LO:HI");

  cmd->callback([flags, &action] {
    action = [flags] {
      TopologyConfig topology = TopologyFromFlags(flags->topology);
      topology.seed = flags->common.seed;
      const auto [lo, hi] = ParseIntRange(flags->topology.values, "--values");
      Rng rng(topology.seed);
      const Market market =
          AssignValuations(Generate(topology, rng), ValueSet{lo, hi}, rng);
      std::optional<OfferState> offers;
      if (!flags->init_offers.empty()) {
        const auto [olo, ohi] = ParseIntRange(flags->init_offers, "--init-offers");
        offers = InitializeOffers(market, UniformOffers{olo, ohi}, rng);
      }
      const auto path = OutputDir(flags->common) / flags->file;
      io::WriteFile(path, io::SerializeMarket(market, offers ? &*offers : nullptr));
      Report("wrote " + path.string() + " (" + std::to_string(market.num_agents()) +
             " agents, " + std::to_string(market.num_trades()) + " trades)");
      return 0;
    };
  });
}

}  // namespace tradenet::cli
