#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run_cli(const std::string& args, const std::string& out_file) {
  const std::string cmd = std::string(IBQ_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kOut = std::string(IBQ_TEST_TMP) + "/cli_unit_out.txt";

}  // namespace

TEST_CASE("cli exit codes") {
  CHECK(run_cli("--help", kOut) == 0);
  CHECK(run_cli("", kOut) == 2);
  CHECK(run_cli("frobnicate", kOut) == 2);
  CHECK(run_cli("maxlut --node check --in-bits 4 --out-bits 0 --channel bpsk:2.0", kOut) == 2);
  CHECK(run_cli("quantize --channel nope --n 2", kOut) == 2);
  CHECK(run_cli("quantize --channel bsc:2 --n 2", kOut) == 2);
  CHECK(run_cli("ldpc simulate --design /nonexistent/file --max-frames 1", kOut) == 2);
  CHECK(run_cli("info --channel bsc:0.11", kOut) == 0);
}

TEST_CASE("cli quantize on an exact channel") {
  REQUIRE(run_cli("quantize --channel bsc:0.11 --alg dp --n 2", kOut) == 0);
  const std::string text = slurp(kOut);
  CHECK(text.rfind("# ibq quantize --channel bsc:0.11 --alg dp --n 2 seed=1\n", 0) == 0);
  CHECK(text.find("dp,400,2,1,0,1,") != std::string::npos);
}

TEST_CASE("cli maxlut writes a 16 by 16 table") {
  REQUIRE(run_cli("maxlut --node check --in-bits 4 --out-bits 4 --channel bpsk:2.0", kOut) == 0);
  const std::string text = slurp(kOut);
  CHECK(text.find("\nlut 16 16 16\n") != std::string::npos);
}

TEST_CASE("cli info reports the capacity of a BSC") {
  REQUIRE(run_cli("info --channel bsc:0.5", kOut) == 0);
  CHECK(slurp(kOut).find("2,2,1,1,0\n") != std::string::npos);
}
