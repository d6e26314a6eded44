#include <catch_amalgamated.hpp>

#include "acid/diff_signals.hpp"

using namespace acid;
using namespace acid::signals;

namespace {

struct DiffRow {
  std::string path;
  std::vector<std::string> removed;
  std::vector<std::string> added;
  std::set<std::string> expected;  // field names of the signals that must fire
};

// Hand labels from the detector descriptions, one diff per row.
const std::vector<DiffRow>& diff_table() {
  static const std::vector<DiffRow> rows{
      {"net.ts", {"const port = 8332;"}, {"const port = 9650;"}, {"data_changed", "data_net_changed"}},
      {"a.ts", {}, {"// retry on failure"}, {"changed_comment"}},
      {"main.tf", {}, {R"(resource "aws_s3_bucket" "b" {})"}, {"changed_service"}},
      {"index.ts", {}, {R"(import * as gcp from "@pulumi/gcp";)"}, {"changed_include"}},
      {"main.py", {}, {"from pulumi_aws import s3"}, {"changed_include"}},
      {"main.py", {}, {"# TODO: tighten"}, {"changed_comment"}},
      {"main.tf", {}, {R"(module "vpc" {)"}, {"changed_include"}},
      {"main.tf", {R"(  source = "./old")"}, {R"(  source = "./new")"}, {"changed_include", "data_changed"}},
      {"main.tf", {R"(password = "hunter2")"}, {R"(password = "hunter3")"}, {"data_changed", "data_cred_changed"}},
      {"index.ts", {}, {R"(const bucket = new aws.s3.Bucket("logs");)"}, {"changed_service"}},
      {"index.ts",
       {R"(const sshCidr = "0.0.0.0/0";)"},
       {R"(const sshCidr = "10.0.0.0/8";)"},
       {"data_changed", "data_net_changed"}},
      {"main.tf", {"enable_encryption = false"}, {"enable_encryption = true"}, {"data_changed", "changed_secu"}},
      {"Program.cs", {}, {"using Pulumi;"}, {"changed_include"}},
      {"Program.cs", {}, {"/* block comment */"}, {"changed_comment"}},
      {"main.go", {}, {R"(	"github.com/pulumi/pulumi-aws/sdk/v5/go/aws/s3")"}, {"changed_include"}},
      {"Main.java", {}, {"import com.pulumi.Pulumi;"}, {"changed_include"}},
      {"main.tf", {}, {R"(provider "aws" {)"}, {"changed_service"}},
      {"index.ts",
       {R"(const apiUrl = "https://a.example.com";)"},
       {R"(const apiUrl = "https://b.example.com";)"},
       {"data_changed", "data_net_changed", "changed_secu"}},
      {"index.ts", {"const replicas = 2;"}, {"const replicas = 3;"}, {"data_changed"}},
      {"index.ts", {"const name = computeName();"}, {"const name = computeName2();"}, {}},
      {"README.md", {}, {"// comment", "port = 1"}, {}},
      {"index.ts", {"const timeout = 30; // seconds"}, {"const timeout = 60; // seconds"}, {"data_changed"}},
      {"main.tf", {R"(instance_type = "t2.micro")"}, {R"(instance_type = "t3.micro")"}, {"data_changed"}},
      {"index.ts", {}, {R"(const tlsPolicy = "strict";)"}, {"changed_secu"}},
      {"main.py", {"db_port = 5432"}, {"db_port = 5433"}, {"data_changed", "data_net_changed"}},
      {"index.ts",
       {R"(const adminRole = "reader";)"},
       {R"(const adminRole = "writer";)"},
       {"data_changed", "data_cred_changed"}},
      {"index.ts", {}, {"  * continued doc comment"}, {"changed_comment"}},
      {"index.ts", {"if (x == 1) {"}, {"if (x == 2) {"}, {}},
      {"index.ts",
       {R"(const k = new k8s.apps.v1.Deployment("app", {)"},
       {R"(const k = new k8s.apps.v1.Deployment("web", {)"},
       {"changed_service"}},
      {"main.tf", {R"(cidr_blocks = ["0.0.0.0/0"])"}, {R"(cidr_blocks = ["10.0.0.0/8"])"}, {"data_changed", "data_net_changed"}},
  };
  return rows;
}

vcs::FileChange change_of(const DiffRow& row) {
  vcs::FileChange fc;
  fc.path = row.path;
  std::uint32_t n = 1;
  for (const auto& l : row.removed) fc.removed_lines.push_back({n++, l});
  n = 1;
  for (const auto& l : row.added) fc.added_lines.push_back({n++, l});
  return fc;
}

iac::RepoIacProfile pulumi_root() {
  iac::RepoIacProfile p;
  p.markers = {{"", iac::Platform::Pulumi}};
  return p;
}

std::set<std::string> fired(const DiffSignals& s) {
  std::set<std::string> out;
  for (Signal sig : kAllSignals)
    if (s.get(sig)) out.insert(std::string(field_name(sig)));
  return out;
}

}  // namespace

TEST_CASE("detector examples") {
  auto profile = pulumi_root();
  auto port = detect_diff_signals({change_of(diff_table()[0])}, profile);
  CHECK(port.data_changed());
  CHECK(port.data_net_changed());
  REQUIRE(port.evidence(Signal::DataNetChanged).size() == 1);
  CHECK(port.evidence(Signal::DataNetChanged)[0] == DiffEvidence{"net.ts", "const port = 9650;"});

  auto comment = detect_diff_signals({change_of(diff_table()[1])}, profile);
  CHECK(fired(comment) == std::set<std::string>{"changed_comment"});

  auto resource = detect_diff_signals({change_of(diff_table()[2])}, profile);
  CHECK(resource.changed_service());
}

TEST_CASE("30-diff hand-labelled table") {
  REQUIRE(diff_table().size() == 30);
  auto profile = pulumi_root();
  int agree = 0;
  for (const auto& row : diff_table()) {
    INFO(row.path << " -" << (row.removed.empty() ? "" : row.removed[0]) << " +"
                  << (row.added.empty() ? "" : row.added[0]));
    auto s = detect_diff_signals({change_of(row)}, profile);
    CHECK(fired(s) == row.expected);
    agree += fired(s) == row.expected;
  }
  CHECK(agree == 30);
}

TEST_CASE("signals carry evidence drawn from the changed lines") {
  auto profile = pulumi_root();
  std::vector<vcs::FileChange> all;
  for (const auto& row : diff_table()) all.push_back(change_of(row));
  auto s = detect_diff_signals(all, profile);
  for (Signal sig : kAllSignals) {
    INFO(field_name(sig));
    CHECK(s.get(sig) == !s.evidence(sig).empty());
    for (const auto& ev : s.evidence(sig)) {
      bool found = false;
      for (const auto& row : diff_table()) {
        if (row.path != ev.path) continue;
        for (const auto& l : row.added) found = found || l == ev.line;
        for (const auto& l : row.removed) found = found || l == ev.line;
      }
      CHECK(found);
    }
  }
  // combining diffs only adds signals
  for (const auto& row : diff_table()) {
    auto one = fired(detect_diff_signals({change_of(row)}, profile));
    for (const auto& f : one) CHECK(fired(s).contains(f));
  }
  CHECK(detect_diff_signals(all, profile) == s);
}

TEST_CASE("only IaC files count") {
  iac::RepoIacProfile none;  // no markers: .ts is not IaC, .tf still is
  CHECK_FALSE(detect_diff_signals({change_of(diff_table()[0])}, none).any());
  CHECK(detect_diff_signals({change_of(diff_table()[2])}, none).changed_service());
}

TEST_CASE("code tokenizer") {
  using V = std::vector<std::string>;
  CHECK(code_tokens("serverSideEncryption") == V{"server", "side", "encryption"});
  CHECK(code_tokens("HTTPPort = 80") == V{"http", "port", "80"});
  CHECK(code_tokens("db_port") == V{"db", "port"});
  CHECK(code_tokens("ipv4Cidr") == V{"ipv4", "cidr"});
}
