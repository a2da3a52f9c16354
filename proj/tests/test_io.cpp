#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "haprtr/experiment.hpp"
#include "haprtr/io.hpp"
#include "haprtr/plot.hpp"

using namespace haprtr;

namespace {

InstanceFile parse(const std::string &text) {
  std::istringstream is(text);
  return read_instance(is);
}

std::size_t parse_error_line(const std::string &text) {
  try {
    parse(text);
  } catch (const ParseError &e) {
    return e.line();
  }
  return 0;
}

ExperimentConfig config_from(const std::string &text) {
  std::istringstream is(text);
  return load_experiment_config(is);
}

std::size_t count(const std::string &haystack, const std::string &needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

} // namespace

TEST(InstanceFormat, RoundTripsReadsAndTruth) {
  const Instance inst = generate_instance(9, 7, 0.5, 0.2, 31);
  std::ostringstream os;
  write_instance(os, inst.reads, inst.truth_h);
  const InstanceFile back = parse(os.str());
  EXPECT_EQ(back.reads, inst.reads);
  ASSERT_TRUE(back.truth.has_value());
  EXPECT_EQ(*back.truth, inst.truth_h);

  std::ostringstream again;
  write_instance(again, back.reads, back.truth);
  EXPECT_EQ(again.str(), os.str());
}

TEST(InstanceFormat, TruthIsOptional) {
  const InstanceFile f = parse("HAP1 2 3\n+x-\nxx+\n");
  EXPECT_FALSE(f.truth.has_value());
  EXPECT_EQ(f.reads.observed_count(), 3);
  EXPECT_EQ(*f.reads.entry(0, 2), -1);
}

TEST(InstanceFormat, FullObservationHasNoMissingMarks) {
  const Instance inst = generate_instance(6, 8, 1.0, 0.3, 2);
  std::ostringstream os;
  write_instance(os, inst.reads, std::nullopt);
  EXPECT_EQ(os.str().find('x'), std::string::npos);
}

TEST(InstanceFormat, ParseErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line(""), 1u);
  EXPECT_EQ(parse_error_line("HAP2 1 2\n++\n"), 1u);
  EXPECT_EQ(parse_error_line("HAP1  1 2\n++\n"), 1u);
  EXPECT_EQ(parse_error_line("HAP1 1 1\n+\n"), 1u);
  EXPECT_EQ(parse_error_line("HAP1 2 2\n++\n+\n"), 3u);
  EXPECT_EQ(parse_error_line("HAP1 2 2\n++\n+?\n"), 3u);
  EXPECT_EQ(parse_error_line("HAP1 2 2\n++\n"), 3u);
  EXPECT_EQ(parse_error_line("HAP1 1 2\n++"), 2u);
  EXPECT_EQ(parse_error_line("HAP1 1 2\n++\nTRUTH +\n"), 3u);
  EXPECT_EQ(parse_error_line("HAP1 1 2\n++\nTRUTH +x\n"), 3u);
  EXPECT_EQ(parse_error_line("HAP1 1 2\n++\nTRUTH ++\nmore\n"), 4u);
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_THROW(read_file("/nonexistent/dir/file.hap"), IoError);
  EXPECT_THROW(write_file_atomically("/nonexistent/dir/out.csv", "x"), IoError);
}

TEST(Files, AtomicWriteLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "haprtr_test_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / "a.txt";
  write_file_atomically(path, "hello\n");
  EXPECT_EQ(read_file(path), "hello\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(ConfigFile, ParsesKeysCommentsAndLists) {
  const ExperimentConfig cfg = config_from(
      "# sweep\n"
      "m = 30\n"
      "n=25   # sites\n"
      "pd_grid = 0.2, 0.4\n"
      "methods = rtr\n"
      "rtr.delta0 = 0.5\n"
      "rtr.init = spectral\n"
      "altmin.max_sweeps = 7\n"
      "\n");
  EXPECT_EQ(cfg.m, 30);
  EXPECT_EQ(cfg.n, 25);
  EXPECT_EQ(cfg.pd_grid, (std::vector<double>{0.2, 0.4}));
  EXPECT_EQ(cfg.methods, (std::vector<std::string>{"rtr"}));
  EXPECT_EQ(cfg.method.rtr.delta0, 0.5);
  EXPECT_EQ(cfg.method.init, InitMode::Spectral);
  EXPECT_EQ(cfg.method.altmin.max_sweeps, 7u);
  EXPECT_EQ(cfg.trials, 20u);
}

TEST(ConfigFile, ErrorsNameTheProblem) {
  auto message = [](const std::string &text) -> std::string {
    try {
      config_from(text);
    } catch (const Error &e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("bogus = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(message("m = 3\nm = 4\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("trials = -2\n").find("trials"), std::string::npos);
  EXPECT_NE(message("rtr.delta0 = 9\n").find("rtr.delta0"), std::string::npos);
  EXPECT_NE(message("methods = rtr, sdp\n").find("sdp"), std::string::npos);
  EXPECT_NE(message("pd_grid = 0.3, 1.5\n").find("pd_grid"), std::string::npos);
  EXPECT_NE(message("just text\n").find("line 1"), std::string::npos);
}

TEST(Csv, RoundTripAndShortestDoubles) {
  ExperimentRecord r;
  r.pd = 0.3;
  r.err = 0.35;
  r.trial = 4;
  r.seed = 18446744073709551615ull;
  r.method = "rtr";
  r.hd = 3;
  r.mec = 120;
  r.unrecoverable_sites = 1;
  r.iterations = 9;
  r.grad_norm = 1.25e-7;
  const std::string text = csv_string({r});
  EXPECT_EQ(text, std::string(kCsvHeader) +
                      "\n0.3,0.35,4,18446744073709551615,rtr,3,120,1,9,1.25e-07,"
                      "0.000\n");
  std::istringstream is(text);
  const auto back = read_csv(is);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].seed, r.seed);
  EXPECT_EQ(back[0].grad_norm, r.grad_norm);
  EXPECT_EQ(back[0].method, "rtr");
}

TEST(Csv, HeaderMismatchNamesColumn) {
  std::istringstream is(
      "pd,err,trial,seed,method,hamming,mec,unrecoverable_sites,iterations,"
      "grad_norm,wall_time_ms\n");
  try {
    read_csv(is);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("hamming"), std::string::npos);
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(Csv, BadRowReportsLine) {
  std::istringstream is(std::string(kCsvHeader) +
                        "\n0.3,0.35,0,1,rtr,0,0,0,1,0,0\n0.3,0.35,1,1,rtr\n");
  try {
    read_csv(is);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Plot, OnePathPerMethodWithOneVertexPerPd) {
  std::vector<ExperimentRecord> records;
  for (const char *method : {"altmin", "rtr"})
    for (double pd : {0.3, 0.5, 0.7})
      for (std::size_t t = 0; t < 2; ++t) {
        ExperimentRecord r;
        r.pd = pd;
        r.err = 0.35;
        r.trial = t;
        r.method = method;
        r.hd = static_cast<Eigen::Index>(10 * (1.0 - pd) + t);
        records.push_back(r);
      }
  const std::string svg = render_hd_chart(records);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "<path class=\"series\""), 2u);
  std::size_t pos = 0;
  for (int k = 0; k < 2; ++k) {
    pos = svg.find("<path class=\"series\"", pos);
    const std::size_t d = svg.find(" d=\"", pos);
    const std::size_t end = svg.find('"', d + 4);
    const std::string path = svg.substr(d + 4, end - d - 4);
    EXPECT_EQ(count(path, "M "), 1u);
    EXPECT_EQ(count(path, " L "), 2u);
    pos = end;
  }
  EXPECT_THROW(render_hd_chart({}), ParameterError);
}

TEST(Plot, SummaryMeansAndStandardErrors) {
  std::vector<ExperimentRecord> records(3);
  records[0].hd = 1;
  records[1].hd = 2;
  records[2].hd = 3;
  for (auto &r : records) {
    r.method = "rtr";
    r.pd = 0.5;
  }
  const auto s = summarize_hd(records);
  ASSERT_EQ(s.at("rtr").size(), 1u);
  EXPECT_DOUBLE_EQ(s.at("rtr")[0].mean_hd, 2.0);
  EXPECT_DOUBLE_EQ(s.at("rtr")[0].std_error, 1.0 / std::sqrt(3.0));
}
