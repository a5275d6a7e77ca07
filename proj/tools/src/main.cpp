#include <iostream>
#include <string>

#include "commands.hpp"
#include "common.hpp"
#include "tradenet/io/results.hpp"

namespace {

using tradenet::cli::Exit;

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

int Fail(const std::string& cls, const std::string& message, int code) {
  std::cerr << "error: class=" << cls << " message=" << Quote(message) << '\n';
  return code;
}

int ExitFor(const tradenet::Error& e) {
  const std::string cls = e.error_class();
  if (cls == "io") return Exit::kIo;
  if (cls == "parse" || cls == "validation" || cls == "domain") return Exit::kInvalidInput;
  if (cls == "capacity") return Exit::kCapacity;
  if (cls == "precondition") return Exit::kPrecondition;
  if (cls == "usage") return Exit::kUsage;
  return Exit::kOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized trading-network market simulator", "tradenet"};
  app.set_version_flag("--version", std::string(tradenet::io::kArtifactVersion));
  app.require_subcommand(1);

  tradenet::cli::Action action;
  tradenet::cli::RegisterGenerate(app, action);
  tradenet::cli::RegisterRun(app, action);
  tradenet::cli::RegisterShock(app, action);
  tradenet::cli::RegisterSweep(app, action);
  tradenet::cli::RegisterVerify(app, action);
  tradenet::cli::RegisterPlot(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("usage", e.what(), Exit::kUsage);
  }

  try {
    return action ? action() : Exit::kUsage;
  } catch (const tradenet::Error& e) {
    return Fail(e.error_class(), e.what(), ExitFor(e));
  } catch (const std::exception& e) {
    return Fail("internal", e.what(), Exit::kOther);
  }
}
