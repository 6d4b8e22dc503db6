#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "../support/check_error.hpp"
#include "rydsim/schedule_io.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;

namespace {

std::vector<PulseSchedule> sample_schedules() {
  const InteractionSpec v{from_2pi_mhz(40.0), from_2pi_mhz(0.1)};
  return {
      sta_sequence(CpgSpec::pi_gate(2), 1.0, v),
      sta_sequence(CpgSpec{3, {0.3, -2.2}}, 0.7, v),
      adiabatic_sequence(pi, 1.1, 2.5, v),
      nonadiabatic_sequence(12.314065835724366, v, 1.3),
      sta_sequence(CpgSpec::pi_gate(2), 1.0, v).perturbed(0.1, -0.03, 0.2),
  };
}

}  // namespace

TEST_CASE("schedules round-trip bit for bit") {
  for (const auto& s : sample_schedules()) {
    const std::string text = schedule_to_json(s);
    const PulseSchedule back = schedule_from_json(text);
    CHECK(back == s);
    CHECK(schedule_to_json(back) == text);
    CHECK(schedule_to_json(back, -1).find('\n') == std::string::npos);
  }
}

TEST_CASE("schedule json fields") {
  const auto doc = nlohmann::json::parse(schedule_to_json(sample_schedules()[2]));
  CHECK(doc["scheme"] == "adiabatic");
  CHECK(doc["n_atoms"] == 2);
  REQUIRE(doc["segments"].size() == 4);
  const auto& seg = doc["segments"][3];
  CHECK(seg["family"] == "adiabatic");
  CHECK(seg["params"]["half"] == "second");
  CHECK(seg["params"]["tau_us"].get<double>() == 2.5);
  CHECK(seg["phi_rad"].get<double>() == -pi / 2);
}

TEST_CASE("malformed schedule documents") {
  CHECK_ERROR_KIND(schedule_from_json("{"), ErrorKind::parse);
  CHECK_ERROR_KIND(schedule_from_json("{}"), ErrorKind::parse);
  auto doc = nlohmann::json::parse(schedule_to_json(sample_schedules()[0]));
  auto bad = doc;
  bad["segments"][0]["family"] = "square";
  CHECK_ERROR_KIND(schedule_from_json(bad.dump()), ErrorKind::parse);
  bad = doc;
  bad["segments"][0]["params"]["alpha"] = {0.0, 1.0};
  CHECK_ERROR_KIND(schedule_from_json(bad.dump()), ErrorKind::parse);
  bad = doc;
  bad["segments"][0]["level_a"] = 2;
  CHECK_ERROR_KIND(schedule_from_json(bad.dump()), ErrorKind::parse);
  bad = doc;
  bad["scheme"] = "magic";
  CHECK_ERROR_KIND(schedule_from_json(bad.dump()), ErrorKind::parse);
  // Well-formed but inconsistent: validation rejects it.
  bad = doc;
  bad["segments"][1]["t_start_us"] = 0.5;
  CHECK_ERROR_KIND(schedule_from_json(bad.dump()), ErrorKind::invalid_parameter);
}

TEST_CASE("pulse table") {
  const PulseSchedule s = sample_schedules()[0];
  const std::string csv = pulse_table_csv(s, 0, 5);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t_us,omega_rad_per_us,delta_rad_per_us,phi_rad");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().rfind("0,0,", 0) == 0);
  CHECK(rows[2].rfind("0.5,", 0) == 0);
  CHECK(rows.back().rfind("1,", 0) == 0);
  CHECK_ERROR_KIND(pulse_table_csv(s, 9, 5), ErrorKind::invalid_parameter);
  CHECK_ERROR_KIND(pulse_table_csv(s, 0, 1), ErrorKind::invalid_parameter);
}

TEST_CASE("trajectory csv") {
  Trajectory t;
  t.times = {0.0, 0.5};
  Vector a = Vector::Zero(9), b = Vector::Zero(9);
  a(0) = 1.0;
  b(4) = cplx(0.0, -1.0);
  t.states = {a, b};
  const std::string amp = trajectory_csv(t, TrajectoryColumns::amplitudes);
  CHECK(amp.rfind("t_us,re_amp_0,im_amp_0,re_amp_1", 0) == 0);
  CHECK(amp.find("\n0.5,0,0,0,0,0,0,0,0,0,-1,") != std::string::npos);
  const std::string pop = trajectory_csv(t, TrajectoryColumns::populations);
  CHECK(pop.rfind("t_us,pop_basis_0,pop_basis_1", 0) == 0);
  CHECK(pop.find("\n0.5,0,0,0,0,1,0,0,0,0") != std::string::npos);
  Trajectory m;
  m.times = {0.0};
  m.states = {Matrix::Identity(9, 9) / 9.0};
  CHECK_ERROR_KIND(trajectory_csv(m, TrajectoryColumns::amplitudes), ErrorKind::invalid_parameter);
  CHECK(trajectory_csv(m, TrajectoryColumns::populations).find("0.1111111111111111") !=
        std::string::npos);
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double x = dist(rng) * std::pow(10.0, k % 17 - 8);
    CHECK(std::stod(format_double(x)) == x);
  }
}
