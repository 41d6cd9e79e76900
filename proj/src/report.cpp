#include "orderpick/report.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace orderpick {

Aggregate aggregate(const std::vector<double>& samples) {
  Aggregate a;
  a.n = static_cast<int>(samples.size());
  if (a.n == 0) return a;
  double sum = 0.0;
  for (double s : samples) sum += s;
  a.mean = sum / a.n;
  if (a.n < 2) return a;
  double ss = 0.0;
  for (double s : samples) ss += (s - a.mean) * (s - a.mean);
  a.stddev = std::sqrt(ss / (a.n - 1));
  if (a.stddev > 0.0) {
    const boost::math::students_t dist(a.n - 1);
    a.ci95 = boost::math::quantile(dist, 0.975) * a.stddev / std::sqrt(static_cast<double>(a.n));
  }
  return a;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::string episodes_csv(const std::vector<MetricsReport>& episodes, uint64_t config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << hash_hex(config_hash) << '\n';
  os << "episode,pick_rate_lines_per_hour,agv_distance_m,picker_distance_m,agv_idle_s,"
        "picker_idle_s,mean_lead_time_s\n";
  for (size_t e = 0; e < episodes.size(); ++e) {
    const MetricsReport& m = episodes[e];
    os << e << ',' << fmt(m.pick_rate_lines_per_hour) << ',' << fmt(m.agv_distance_m) << ','
       << fmt(m.picker_distance_m) << ',' << fmt(m.agv_idle_s) << ',' << fmt(m.picker_idle_s)
       << ',' << fmt(m.mean_lead_time_s) << '\n';
  }
  return os.str();
}

std::string aggregate_csv(const EvalReport& report, uint64_t config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << hash_hex(config_hash) << '\n';
  os << "metric,mean,ci95,stddev,n\n";
  auto row = [&](const char* name, const Aggregate& a) {
    os << name << ',' << fmt(a.mean) << ',' << fmt(a.ci95) << ',' << fmt(a.stddev) << ',' << a.n
       << '\n';
  };
  row("pick_rate_lines_per_hour", report.pick_rate);
  row("agv_distance_m", report.agv_distance);
  row("picker_distance_m", report.picker_distance);
  row("agv_idle_s", report.agv_idle);
  row("picker_idle_s", report.picker_idle);
  row("mean_lead_time_s", report.lead_time);
  return os.str();
}

std::string curve_csv(const std::vector<CurvePoint>& curve, uint64_t config_hash) {
  std::ostringstream os;
  os << "# config_hash=" << hash_hex(config_hash) << '\n';
  os << "episode,pick_rate,mean_reward,policy_loss,value_loss,entropy\n";
  for (const CurvePoint& p : curve)
    os << p.episode << ',' << fmt(p.pick_rate) << ',' << fmt(p.mean_reward) << ','
       << fmt(p.policy_loss) << ',' << fmt(p.value_loss) << ',' << fmt(p.entropy) << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace orderpick
