#include <charconv>
#include <cmath>
#include <fstream>

#include "sgdphase/errors.hpp"
#include "sgdphase/simulate.hpp"

namespace sgdphase {

nlohmann::json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

void write_trajectory(const LossTrajectory& traj, const std::string& csv_path) {
  std::string out = "t,loss,stderr\n";
  char buf[32];
  for (std::size_t t = 0; t < traj.losses.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    auto r = std::to_chars(buf, buf + sizeof(buf), traj.losses[t]);
    out.append(buf, r.ptr);
    out += ',';
    if (t < traj.stderrs.size()) {
      r = std::to_chars(buf, buf + sizeof(buf), traj.stderrs[t]);
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  std::ofstream f(csv_path, std::ios::binary);
  if (!f) fail(ErrorKind::config_error, "cannot write " + csv_path);
  f << out;
  std::ofstream side(csv_path + ".json", std::ios::binary);
  if (!side) fail(ErrorKind::config_error, "cannot write " + csv_path + ".json");
  nlohmann::json meta = traj.metadata;
  meta["steps_recorded"] = traj.losses.empty() ? 0 : traj.losses.size() - 1;
  side << meta.dump(2) << '\n';
}

}  // namespace sgdphase
