/*
 * Copyright 2026 The codesched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "codesched/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "codesched/delay.hpp"

namespace codesched {

namespace {

using nlohmann::json;

std::string field_name(const std::string& base, int index,
                       const std::string& sub = {}) {
  std::ostringstream os;
  os << base << "[" << index << "]";
  if (!sub.empty()) os << "." << sub;
  return os.str();
}

double parse_sensitivity(const json& value, const std::string& field) {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") return kMaxSensitivity;
    throw std::runtime_error(field + ": expected a number or \"inf\"");
  }
  if (!value.is_number()) {
    throw std::runtime_error(field + ": expected a number or \"inf\"");
  }
  return value.get<double>();
}

}  // namespace

std::vector<Violation> validate(const NetworkInstance& instance) {
  std::vector<Violation> out;
  const auto flag = [&out](std::string field, std::string message) {
    out.push_back({std::move(field), std::move(message)});
  };

  if (instance.transmitters < 1) {
    flag("transmitters", "must be >= 1");
  }
  if (instance.receivers.empty()) {
    flag("receivers", "at least one receiver is required");
  }
  if (!(instance.packet_size > 0.0) || !std::isfinite(instance.packet_size)) {
    flag("packet_size", "must be a positive finite number");
  }
  if (!(instance.k_max >= 1.0) || !std::isfinite(instance.k_max)) {
    flag("k_max", "must be a finite number >= 1");
  }

  for (int j = 0; j < instance.num_receivers(); ++j) {
    const auto& r = instance.receivers[static_cast<size_t>(j)];
    if (!(r.feedback_delay >= 0.0) || !std::isfinite(r.feedback_delay)) {
      flag(field_name("receivers", j, "feedback_delay"), "must be >= 0");
    }
    if (!(r.sensitivity >= 1.0)) {
      flag(field_name("receivers", j, "p"), "must be >= 1 (or \"inf\")");
    }
    if (!(r.delay_bound > 0.0) || !std::isfinite(r.delay_bound)) {
      flag(field_name("receivers", j, "delay_bound"), "must be positive");
    }
    if (r.fixed_k) {
      if (!(*r.fixed_k >= 1.0) || !(*r.fixed_k <= instance.k_max)) {
        flag(field_name("receivers", j, "fixed_k"),
             "must lie in [1, k_max]");
      }
    }
  }

  if (static_cast<int>(instance.erasure.size()) != instance.transmitters) {
    flag("erasure", "must have one row per transmitter");
  } else {
    for (int i = 0; i < instance.transmitters; ++i) {
      const auto& row = instance.erasure[static_cast<size_t>(i)];
      if (static_cast<int>(row.size()) != instance.num_receivers()) {
        flag(field_name("erasure", i), "must have one entry per receiver");
        continue;
      }
      for (int j = 0; j < instance.num_receivers(); ++j) {
        const double e = row[static_cast<size_t>(j)];
        if (!(e >= 0.0 && e < 1.0)) {
          std::ostringstream os;
          os << "erasure[" << i << "][" << j << "]";
          flag(os.str(), "must lie in [0, 1)");
        }
      }
    }
  }
  return out;
}

NetworkInstance load_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }

  NetworkInstance instance;
  try {
    instance.transmitters = doc.value("transmitters", 1);
    instance.packet_size = doc.value("packet_size", 1.0);
    instance.k_max = doc.at("k_max").get<double>();

    const auto& receivers = doc.at("receivers");
    if (!receivers.is_array()) {
      throw std::runtime_error("receivers: expected an array");
    }
    int idx = 0;
    for (const auto& r : receivers) {
      ReceiverSpec spec;
      spec.label = r.value("label", field_name("receiver", idx));
      spec.feedback_delay = r.at("feedback_delay").get<double>();
      spec.sensitivity =
          parse_sensitivity(r.at("p"), field_name("receivers", idx, "p"));
      spec.delay_bound = r.at("delay_bound").get<double>();
      if (r.contains("fixed_k")) {
        spec.fixed_k = r.at("fixed_k").get<double>();
      }
      instance.receivers.push_back(std::move(spec));
      ++idx;
    }

    const auto& erasure = doc.at("erasure");
    if (!erasure.is_array()) {
      throw std::runtime_error("erasure: expected an array of rows");
    }
    for (const auto& row : erasure) {
      instance.erasure.push_back(row.get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config field error: ") + e.what());
  }

  const auto violations = validate(instance);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "config validation failed:";
    for (const auto& v : violations) {
      os << "\n  " << v.field << ": " << v.message;
    }
    throw std::runtime_error(os.str());
  }
  return instance;
}

NetworkInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_instance(buffer.str());
}

std::string serialize(const NetworkInstance& instance) {
  json doc;
  doc["transmitters"] = instance.transmitters;
  doc["packet_size"] = instance.packet_size;
  doc["k_max"] = instance.k_max;
  doc["receivers"] = json::array();
  for (const auto& r : instance.receivers) {
    json jr;
    jr["label"] = r.label;
    jr["feedback_delay"] = r.feedback_delay;
    if (std::isinf(r.sensitivity)) {
      jr["p"] = "inf";
    } else {
      jr["p"] = r.sensitivity;
    }
    jr["delay_bound"] = r.delay_bound;
    if (r.fixed_k) jr["fixed_k"] = *r.fixed_k;
    doc["receivers"].push_back(std::move(jr));
  }
  doc["erasure"] = instance.erasure;
  return doc.dump(2) + "\n";
}

CheckResult check_solution(const NetworkInstance& instance,
                           const Solution& solution, double tol) {
  const int w = instance.transmitters;
  const int m = instance.num_receivers();
  if (static_cast<int>(solution.bucket_sizes.size()) != m ||
      static_cast<int>(solution.rates.size()) != m ||
      static_cast<int>(solution.schedule.size()) != w) {
    throw std::invalid_argument("check_solution: dimension mismatch");
  }
  for (const auto& row : solution.schedule) {
    if (static_cast<int>(row.size()) != m) {
      throw std::invalid_argument("check_solution: schedule row mismatch");
    }
  }

  CheckResult result;
  const auto flag = [&result](std::string field, std::string message) {
    result.ok = false;
    result.violations.push_back({std::move(field), std::move(message)});
  };

  for (int i = 0; i < w; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const double a = solution.schedule[static_cast<size_t>(i)]
                                        [static_cast<size_t>(j)];
      if (!(a >= -tol && a <= 1.0 + tol)) {
        std::ostringstream os;
        os << "schedule[" << i << "][" << j << "]";
        flag(os.str(), "must lie in [0, 1]");
      }
      row_sum += a;
    }
    if (row_sum > 1.0 + tol) {
      flag(field_name("schedule", i), "row sums above 1");
    }
  }

  for (int j = 0; j < m; ++j) {
    const auto& spec = instance.receivers[static_cast<size_t>(j)];
    const double k = solution.bucket_sizes[static_cast<size_t>(j)];
    const double r = solution.rates[static_cast<size_t>(j)];

    if (!(k >= 1.0 - tol && k <= instance.k_max * (1.0 + tol))) {
      flag(field_name("bucket_sizes", j), "must lie in [1, k_max]");
      continue;
    }
    if (!(r > 0.0)) {
      flag(field_name("rates", j), "must be positive");
      continue;
    }

    double reachable = 0.0;
    for (int i = 0; i < w; ++i) {
      reachable += solution.schedule[static_cast<size_t>(i)]
                                    [static_cast<size_t>(j)] *
                   (1.0 - instance.erasure[static_cast<size_t>(i)]
                                          [static_cast<size_t>(j)]);
    }
    if (r > reachable + tol) {
      flag(field_name("rates", j), "exceeds scheduled reachable rate");
    }

    const double d =
        delay_metric(clamp_interval(k, 1.0, instance.k_max), r,
                     spec.feedback_delay, instance.packet_size,
                     spec.sensitivity);
    if (d > spec.delay_bound * (1.0 + tol)) {
      flag(field_name("receivers", j, "delay"),
           "delay metric exceeds the bound");
    }
  }
  return result;
}

}  // namespace codesched
