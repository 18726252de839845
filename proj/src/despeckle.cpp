// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/despeckle.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "mtsar/error.hpp"
#include "mtsar/io.hpp"
#include "subprocess.hpp"

namespace mtsar {

namespace {

// Mirror index without edge repeat: -1 -> 1, n -> n - 2.
std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

std::string tail(const std::string& text, std::size_t max_len = 2000) {
  return text.size() <= max_len ? text : "..." + text.substr(text.size() - max_len);
}

std::string format_looks(double looks) {
  std::ostringstream s;
  s.precision(17);
  s << looks;
  return s.str();
}

}  // namespace

void validate_spec(const DespecklerSpec& spec) {
  if (const auto* box = std::get_if<BoxcarSpec>(&spec)) {
    if (box->window < 1 || box->window % 2 == 0) {
      fail(ErrorCode::kInvalidArgument,
           "boxcar window must be odd and >= 1, got " + std::to_string(box->window));
    }
  } else if (const auto* ext = std::get_if<ExternalSpec>(&spec)) {
    if (ext->command.empty() || ext->command.front().empty()) {
      fail(ErrorCode::kInvalidArgument, "external despeckler needs a command");
    }
    if (!(ext->timeout_seconds > 0.0)) fail(ErrorCode::kInvalidArgument, "plugin timeout must be positive");
  }
}

DespecklerSpec parse_despeckler_spec(std::string_view text, double timeout_seconds) {
  DespecklerSpec spec;
  if (text == "identity") {
    spec = IdentitySpec{};
  } else if (text.starts_with("boxcar:")) {
    const std::string arg(text.substr(7));
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) {
      fail(ErrorCode::kInvalidArgument, "bad boxcar window '" + arg + "'");
    }
    spec = BoxcarSpec{k};
  } else if (text.starts_with("external:")) {
    ExternalSpec ext;
    std::istringstream words{std::string(text.substr(9))};
    for (std::string w; words >> w;) ext.command.push_back(w);
    ext.timeout_seconds = timeout_seconds;
    spec = std::move(ext);
  } else {
    fail(ErrorCode::kInvalidArgument,
         "unknown despeckler '" + std::string(text) + "' (identity | boxcar:K | external:CMD)");
  }
  validate_spec(spec);
  return spec;
}

std::string describe(const DespecklerSpec& spec) {
  if (std::holds_alternative<IdentitySpec>(spec)) return "identity";
  if (const auto* box = std::get_if<BoxcarSpec>(&spec)) return "boxcar:" + std::to_string(box->window);
  std::string out = "external:";
  const auto& cmd = std::get<ExternalSpec>(spec).command;
  for (std::size_t i = 0; i < cmd.size(); ++i) out += (i ? " " : "") + cmd[i];
  return out;
}

Image boxcar(const Image& image, int window) {
  validate_spec(BoxcarSpec{window});
  if (window == 1) return image;
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  const auto r = static_cast<std::ptrdiff_t>(window / 2);

  // Horizontal window sums, then vertical sums of those; divide once.
  std::vector<double> rows(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double sum = 0.0;
      for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
        sum += image.at(reflect(static_cast<std::ptrdiff_t>(x) + dx, w), y);
      }
      rows[y * w + x] = sum;
    }
  }
  const double area = static_cast<double>(window) * window;
  std::vector<float> out(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double sum = 0.0;
      for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        sum += rows[reflect(static_cast<std::ptrdiff_t>(y) + dy, h) * w + x];
      }
      out[y * w + x] = static_cast<float>(sum / area);
    }
  }
  return Image(w, h, std::move(out));
}

Image external_invoke(const Image& image, const std::vector<std::string>& command,
                      double timeout_seconds, std::optional<double> looks) {
  validate_spec(ExternalSpec{command, timeout_seconds});
  detail::TempDir work;
  const auto in_path = work.path() / "input.sarr";
  const auto out_path = work.path() / "output.sarr";
  write_image(image, in_path);

  std::vector<std::string> argv = command;
  argv.push_back(in_path.string());
  argv.push_back(out_path.string());
  std::vector<std::pair<std::string, std::string>> env;
  if (looks) env.emplace_back(kLooksEnvVar, format_looks(*looks));

  const auto result = detail::run_process(argv, env, timeout_seconds);
  if (result.timed_out) {
    fail(ErrorCode::kTimeout, "plugin '" + command.front() + "' exceeded " +
                                  std::to_string(timeout_seconds) + " s");
  }
  if (result.exit_code != 0) {
    fail(ErrorCode::kSubprocessFailure, "plugin '" + command.front() + "' exited with status " +
                                            std::to_string(result.exit_code) +
                                            "; stderr: " + tail(result.err));
  }
  Image out;
  try {
    out = read_image(out_path);
  } catch (const Error& e) {
    fail(ErrorCode::kMalformedOutput, "plugin '" + command.front() + "' output unreadable: " + e.what());
  }
  if (!out.same_shape(image)) {
    std::ostringstream msg;
    msg << "plugin '" << command.front() << "' returned " << out.width() << "x" << out.height()
        << " for a " << image.width() << "x" << image.height() << " input";
    fail(ErrorCode::kMalformedOutput, msg.str());
  }
  return out;
}

Image despeckle(const Image& image, const DespecklerSpec& spec, std::optional<double> looks) {
  return make_despeckler(spec, looks)(image);
}

Despeckler make_despeckler(const DespecklerSpec& spec, std::optional<double> looks) {
  validate_spec(spec);
  if (std::holds_alternative<IdentitySpec>(spec)) {
    return [](const Image& img) { return img; };
  }
  if (const auto* box = std::get_if<BoxcarSpec>(&spec)) {
    return [k = box->window](const Image& img) { return boxcar(img, k); };
  }
  const auto& ext = std::get<ExternalSpec>(spec);
  return [ext, looks](const Image& img) {
    return external_invoke(img, ext.command, ext.timeout_seconds, looks);
  };
}

PluginCaps query_caps(const std::vector<std::string>& command, double timeout_seconds) {
  validate_spec(ExternalSpec{command, timeout_seconds});
  auto argv = command;
  argv.emplace_back("--caps");
  const auto result = detail::run_process(argv, {}, timeout_seconds);
  if (result.timed_out) fail(ErrorCode::kTimeout, "plugin '" + command.front() + "' --caps timed out");
  if (result.exit_code != 0) {
    fail(ErrorCode::kSubprocessFailure, "plugin '" + command.front() + "' --caps exited with status " +
                                            std::to_string(result.exit_code) +
                                            "; stderr: " + tail(result.err));
  }
  const auto reply = nlohmann::json::parse(result.out, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("protocol") ||
      !reply["protocol"].is_number_integer() || !reply.contains("name") ||
      !reply["name"].is_string()) {
    fail(ErrorCode::kMalformedOutput,
         "plugin '" + command.front() + "' --caps reply is not {\"protocol\": int, \"name\": string}");
  }
  PluginCaps caps{reply["protocol"].get<int>(), reply["name"].get<std::string>()};
  if (caps.protocol != 1) {
    fail(ErrorCode::kMalformedOutput, "plugin '" + command.front() + "' speaks protocol " +
                                          std::to_string(caps.protocol) + ", expected 1");
  }
  return caps;
}

}  // namespace mtsar
