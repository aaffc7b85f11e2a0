#include "monotone/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "monotone/config.hpp"

namespace monotone {

using nlohmann::json;

namespace {

constexpr const char* kRoundsHeader =
    "run,learner,round,true_error,update,p_value,val_error_candidate,val_error_incumbent";
constexpr const char* kSummaryHeader = "learner,aulc_mean,aulc_std,fraction_mean,fraction_std";
constexpr const char* kSweepHeader = "alpha,nv,learner,aulc,fraction,zero";

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

json curve_stats_json(const CurveStats& s) {
  return json{{"learner", to_string(s.learner)},   {"runs", s.runs},
              {"mean_curve", s.mean_curve},         {"std_curve", s.std_curve},
              {"aulc_mean", s.aulc_mean},           {"aulc_std", s.aulc_std},
              {"fraction_mean", s.fraction_mean},   {"fraction_std", s.fraction_std}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ReportError("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw ReportError("failed writing " + path.string());
  }
}

using FileSet = std::map<std::string, std::string>;

std::vector<std::filesystem::path> commit(const FileSet& files, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ReportError("cannot create " + dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  }
  return written;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ReportError("malformed number '" + text + "' in " + where);
  }
  return value;
}

// Code points, so "λ_S" pads like the ASCII labels.
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char ch) { return (ch & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return s + std::string(width > w ? width - w : 0, ' ');
}

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
  return buf.data();
}

struct SummaryRow {
  LearnerKind learner;
  CurveStats stats;
};

struct LoadedSummary {
  std::string name;
  std::vector<SummaryRow> rows;
};

LoadedSummary load_summary(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ReportError("malformed " + path.string() + ": " + e.what());
  }
  LoadedSummary summary;
  try {
    summary.name = doc.at("name").get<std::string>();
    for (const auto& item : doc.at("learners")) {
      SummaryRow row;
      row.learner = parse_learner_kind(item.at("learner").get<std::string>());
      row.stats.learner = row.learner;
      row.stats.runs = item.at("runs").get<int>();
      row.stats.mean_curve = item.at("mean_curve").get<std::vector<double>>();
      row.stats.std_curve = item.at("std_curve").get<std::vector<double>>();
      row.stats.aulc_mean = item.at("aulc_mean").get<double>();
      row.stats.aulc_std = item.at("aulc_std").get<double>();
      row.stats.fraction_mean = item.at("fraction_mean").get<double>();
      row.stats.fraction_std = item.at("fraction_std").get<double>();
      summary.rows.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    throw ReportError("malformed " + path.string() + ": " + e.what());
  }
  if (summary.rows.empty()) {
    throw ReportError(path.string() + " lists no learners");
  }
  std::stable_sort(summary.rows.begin(), summary.rows.end(),
                   [](const SummaryRow& a, const SummaryRow& b) { return a.learner < b.learner; });
  return summary;
}

void add_table(const LoadedSummary& summary, FileSet& files) {
  double best = summary.rows.front().stats.fraction_mean;
  for (const auto& row : summary.rows) best = std::min(best, row.stats.fraction_mean);

  std::ostringstream txt;
  std::ostringstream csv;
  txt << summary.name << " (" << summary.rows.front().stats.runs << " runs)\n";
  txt << pad("", 6) << pad("AULC", 16) << "Fraction\n";
  csv << "learner,aulc_mean,aulc_std,fraction_mean,fraction_std,best_fraction\n";
  for (const auto& row : summary.rows) {
    const CurveStats& s = row.stats;
    const bool is_best = s.fraction_mean == best;
    txt << pad(table_label(row.learner), 6)
        << pad(fixed(s.aulc_mean, 2) + " (" + fixed(s.aulc_std, 2) + ")", 16)
        << fixed(s.fraction_mean, 2) << " (" << fixed(s.fraction_std, 2) << ")"
        << (is_best ? " *" : "") << "\n";
    csv << table_label(row.learner) << ',' << format_number(s.aulc_mean) << ','
        << format_number(s.aulc_std) << ',' << format_number(s.fraction_mean) << ','
        << format_number(s.fraction_std) << ',' << (is_best ? 1 : 0) << "\n";
  }
  txt << "* best monotonicity\n";
  files["table.txt"] = txt.str();
  files["table.csv"] = csv.str();

  for (const auto& row : summary.rows) {
    std::ostringstream curve;
    curve << "round,mean_error,std_error\n";
    for (std::size_t i = 0; i < row.stats.mean_curve.size(); ++i) {
      curve << (i + 1) << ',' << format_number(row.stats.mean_curve[i]) << ','
            << format_number(i < row.stats.std_curve.size() ? row.stats.std_curve[i] : 0.0)
            << "\n";
    }
    files["curve_" + to_string(row.learner) + ".csv"] = curve.str();
  }
}

void add_sweep_surface(const std::filesystem::path& path, FileSet& files) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ReportError(path.string() + " does not start with the sweep header");
  }
  std::ostringstream out;
  out << "alpha,nv,learner,aulc,fraction,zero\n";
  std::size_t rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != 6) throw ReportError("expected 6 fields at " + where);
    parse_double(f[0], where);
    parse_double(f[1], where);
    parse_double(f[3], where);
    const double fraction = parse_double(f[4], where);
    out << f[0] << ',' << f[1] << ',' << f[2] << ',' << f[3] << ',' << f[4] << ','
        << (fraction == 0.0 ? "zero" : "") << "\n";
    ++rows;
  }
  if (rows == 0) throw ReportError(path.string() + " has no rows");
  files["sweep_surface.csv"] = out.str();
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

void write_rounds_csv(const ExperimentResult& result, std::ostream& out) {
  out << kRoundsHeader << "\n";
  // Run-major, so every learner's record for a round sits together.
  const std::size_t runs = result.learners.empty() ? 0 : result.learners.front().runs.size();
  for (std::size_t r = 0; r < runs; ++r) {
    for (const auto& learner : result.learners) {
      const RunResult& run = learner.runs.at(r);
      for (const auto& rec : run.rounds) {
        const RoundDecision& d = rec.decision;
        out << run.run << ',' << to_string(learner.learner) << ',' << rec.round << ','
            << format_number(rec.true_error) << ',' << (d.update ? 1 : 0) << ','
            << optional_number(d.p_value) << ',' << optional_number(d.candidate_val_error) << ','
            << optional_number(d.incumbent_val_error) << "\n";
      }
    }
  }
}

void write_summary_csv(const ExperimentResult& result, std::ostream& out) {
  out << kSummaryHeader << "\n";
  for (const auto& l : result.learners) {
    const CurveStats& s = l.stats;
    out << to_string(l.learner) << ',' << format_number(s.aulc_mean) << ','
        << format_number(s.aulc_std) << ',' << format_number(s.fraction_mean) << ','
        << format_number(s.fraction_std) << "\n";
  }
}

std::string summary_json(const ExperimentResult& result) {
  json learners = json::array();
  for (const auto& l : result.learners) learners.push_back(curve_stats_json(l.stats));
  return json{{"name", result.config.name}, {"learners", learners}}.dump(2) + "\n";
}

void write_sweep_csv(std::span<const SweepCell> cells, std::ostream& out) {
  out << kSweepHeader << "\n";
  for (const auto& cell : cells) {
    for (const auto& l : cell.result.learners) {
      out << format_number(cell.alpha) << ',' << cell.nv << ',' << to_string(l.learner) << ','
          << format_number(l.stats.aulc_mean) << ',' << format_number(l.stats.fraction_mean)
          << ',' << (l.stats.fraction_mean == 0.0 ? 1 : 0) << "\n";
    }
  }
}

std::string verify_json(const RunBoundReport& t, std::span<const ConsistencyEntry> consistency) {
  json entries = json::array();
  for (const auto& e : consistency) {
    entries.push_back(json{{"learner", to_string(e.learner)},
                           {"last_update_rounds", e.last_update_rounds},
                           {"final_error_mean", e.final_error_mean},
                           {"gap_to_standard", e.gap_to_standard ? json(*e.gap_to_standard)
                                                                 : json(nullptr)},
                           {"frozen_fraction", e.frozen_fraction},
                           {"flagged", e.flagged}});
  }
  json doc{{"monotone_run_check",
            {{"alpha", t.alpha},
             {"rounds", t.rounds},
             {"runs", t.runs},
             {"bound", t.bound},
             {"observed_monotone_fraction", t.observed_monotone_fraction},
             {"tolerance", t.tolerance},
             {"vacuous", t.vacuous},
             {"holds", t.run_bound_holds}}},
           {"per_decision_check",
            {{"nonmonotone_decisions", t.nonmonotone_decisions},
             {"decisions", t.decisions},
             {"rate", t.per_decision_rate},
             {"holds", t.per_decision_holds}}},
           {"passed", t.passed()},
           {"consistency", entries}};
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_run_outputs(const ExperimentResult& result,
                                                     const std::filesystem::path& dir) {
  FileSet files;
  std::ostringstream rounds;
  write_rounds_csv(result, rounds);
  files["rounds.csv"] = rounds.str();
  std::ostringstream summary;
  write_summary_csv(result, summary);
  files["summary.csv"] = summary.str();
  files["summary.json"] = summary_json(result);
  files["config.json"] = config_to_json(result.config);
  return commit(files, dir);
}

std::vector<std::filesystem::path> write_sweep_outputs(std::span<const SweepCell> cells,
                                                       const std::filesystem::path& dir) {
  FileSet files;
  std::ostringstream sweep;
  write_sweep_csv(cells, sweep);
  files["sweep.csv"] = sweep.str();
  return commit(files, dir);
}

std::vector<std::filesystem::path> emit_report(const std::filesystem::path& in,
                                               const std::filesystem::path& out) {
  if (!std::filesystem::is_directory(in)) {
    throw ReportError("results directory " + in.string() + " does not exist");
  }
  const auto summary_path = in / "summary.json";
  const auto sweep_path = in / "sweep.csv";
  const bool has_summary = std::filesystem::exists(summary_path);
  const bool has_sweep = std::filesystem::exists(sweep_path);
  if (!has_summary && !has_sweep) {
    throw ReportError("no results in " + in.string() + " (expected summary.json or sweep.csv)");
  }
  FileSet files;
  if (has_summary) add_table(load_summary(summary_path), files);
  if (has_sweep) add_sweep_surface(sweep_path, files);
  return commit(files, out);
}

}  // namespace monotone
