#include "aclrisk/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "aclrisk/error.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace aclrisk {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(PersonPolicy policy) {
  return policy == PersonPolicy::Strict ? "strict" : "highest-mean-confidence";
}

std::optional<PersonPolicy> parse_person_policy(std::string_view text) {
  if (text == "strict") return PersonPolicy::Strict;
  if (text == "highest-mean-confidence") return PersonPolicy::HighestMeanConfidence;
  return std::nullopt;
}

namespace {

std::array<Keypoint2D, kBody25Count> read_person(const json& person, std::size_t person_no) {
  const auto where = "people[" + std::to_string(person_no) + "]";
  if (!person.is_object()) {
    throw Error(ErrorCode::MalformedDocument, where + " is not an object");
  }
  const auto it = person.find("pose_keypoints_2d");
  if (it == person.end() || !it->is_array()) {
    throw Error(ErrorCode::MalformedDocument, where + " has no pose_keypoints_2d array");
  }
  if (it->size() != 3 * kBody25Count) {
    throw Error(ErrorCode::MalformedDocument,
                where + ".pose_keypoints_2d has " + std::to_string(it->size()) +
                    " values, expected 75");
  }
  std::array<Keypoint2D, kBody25Count> kps{};
  for (std::size_t i = 0; i < kBody25Count; ++i) {
    const auto& x = (*it)[3 * i];
    const auto& y = (*it)[3 * i + 1];
    const auto& c = (*it)[3 * i + 2];
    if (!x.is_number() || !y.is_number() || !c.is_number()) {
      throw Error(ErrorCode::MalformedDocument,
                  where + " keypoint " + std::to_string(i) + " is not numeric");
    }
    kps[i] = {x.get<double>(), y.get<double>(), c.get<double>()};
    if (kps[i].confidence < 0.0 || kps[i].confidence > 1.0) {
      throw Error(ErrorCode::MalformedDocument,
                  where + " keypoint " + std::to_string(i) + " confidence outside [0,1]");
    }
  }
  return kps;
}

double mean_confidence(const std::array<Keypoint2D, kBody25Count>& kps) {
  double sum = 0.0;
  int count = 0;
  for (const auto& kp : kps) {
    if (kp.is_undetected()) continue;
    sum += kp.confidence;
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

}  // namespace

SkeletonFrame parse_openpose_frame(std::string_view document, PersonPolicy policy,
                                   long frame_index) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::MalformedDocument, "frame document is not a JSON object");
  }
  const auto people = doc.find("people");
  if (people == doc.end() || !people->is_array()) {
    throw Error(ErrorCode::MalformedDocument, "missing \"people\" array");
  }
  if (people->empty()) {
    throw Error(ErrorCode::NoPersonDetected, "people list is empty", frame_index);
  }
  if (policy == PersonPolicy::Strict && people->size() > 1) {
    throw Error(ErrorCode::AmbiguousPerson,
                std::to_string(people->size()) + " people detected in strict mode", frame_index);
  }

  std::optional<std::array<Keypoint2D, kBody25Count>> best;
  double best_score = -1.0;
  for (std::size_t p = 0; p < people->size(); ++p) {
    auto kps = read_person((*people)[p], p);
    const double score = mean_confidence(kps);
    if (!best || score > best_score) {
      best = kps;
      best_score = score;
    }
  }
  return SkeletonFrame::from_keypoints(frame_index, *best);
}

std::string format_openpose_frame(const SkeletonFrame& frame) {
  std::string out = "{\"version\":1.3,\"people\":[{\"person_id\":[-1],\"pose_keypoints_2d\":[";
  for (std::size_t i = 0; i < kBody25Count; ++i) {
    const auto& kp = frame.keypoints[i];
    if (i > 0) out += ',';
    out += detail::format_double(kp.x);
    out += ',';
    out += detail::format_double(kp.y);
    out += ',';
    out += detail::format_double(kp.confidence);
  }
  out += "]}]}\n";
  return out;
}

std::string series_csv_header() {
  std::string header = "frame";
  for (std::size_t i = 0; i < kBody25Count; ++i) {
    const auto k = "kp" + std::to_string(i);
    header += "," + k + "_x," + k + "_y," + k + "_c";
  }
  return header;
}

KeypointSeries parse_series_csv(std::string_view text, View view) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::EmptySource, "CSV series is empty");
  if (detail::trim(lines.front()) != series_csv_header()) {
    throw Error(ErrorCode::MalformedDocument, "CSV header does not match the 76-column layout");
  }

  KeypointSeries series;
  series.view = view;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (detail::trim(lines[row]).empty()) continue;
    const auto cells = detail::split(lines[row], ',');
    const auto line_no = std::to_string(row + 1);
    if (cells.size() != 1 + 3 * kBody25Count) {
      throw Error(ErrorCode::MalformedDocument,
                  "CSV line " + line_no + " has " + std::to_string(cells.size()) +
                      " columns, expected 76");
    }
    const auto index = detail::parse_long(cells[0]);
    if (!index || *index < 0) {
      throw Error(ErrorCode::MalformedDocument, "CSV line " + line_no + " has a bad frame index");
    }
    std::array<Keypoint2D, kBody25Count> kps{};
    for (std::size_t i = 0; i < kBody25Count; ++i) {
      const auto x = detail::parse_double(cells[1 + 3 * i]);
      const auto y = detail::parse_double(cells[2 + 3 * i]);
      const auto c = detail::parse_double(cells[3 + 3 * i]);
      if (!x || !y || !c) {
        throw Error(ErrorCode::MalformedDocument,
                    "CSV line " + line_no + " keypoint " + std::to_string(i) + " is not numeric",
                    *index);
      }
      if (*c < 0.0 || *c > 1.0) {
        throw Error(ErrorCode::MalformedDocument,
                    "CSV line " + line_no + " keypoint " + std::to_string(i) +
                        " confidence outside [0,1]",
                    *index);
      }
      kps[i] = {*x, *y, *c};
    }
    series.frames.push_back(SkeletonFrame::from_keypoints(*index, kps));
  }
  if (series.frames.empty()) throw Error(ErrorCode::EmptySource, "CSV series has no rows");
  if (!has_increasing_frame_indices(series.frames)) {
    throw Error(ErrorCode::MalformedDocument, "CSV frame indices are not strictly increasing");
  }
  return series;
}

std::string format_series_csv(const KeypointSeries& series) {
  std::string out = series_csv_header();
  out += '\n';
  for (const auto& frame : series.frames) {
    out += std::to_string(frame.frame_index);
    for (const auto& kp : frame.keypoints) {
      out += ',';
      out += detail::format_double(kp.x);
      out += ',';
      out += detail::format_double(kp.y);
      out += ',';
      out += detail::format_double(kp.confidence);
    }
    out += '\n';
  }
  return out;
}

std::optional<long> frame_index_from_filename(std::string_view filename) {
  const auto dot = filename.rfind('.');
  std::string_view stem = dot == std::string_view::npos ? filename : filename.substr(0, dot);
  std::size_t end = stem.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == 0) return std::nullopt;
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  return detail::parse_long(stem.substr(begin, end - begin));
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

namespace {

KeypointSeries load_frame_directory(const fs::path& dir, View view, PersonPolicy policy) {
  std::map<long, fs::path> by_index;
  std::vector<std::string> failures;
  std::optional<long> first_bad_frame;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error(ErrorCode::EmptySource, "no .json frame documents in " + dir.string());
  }

  for (const auto& file : files) {
    const auto name = file.filename().string();
    const auto index = frame_index_from_filename(name);
    if (!index) {
      failures.push_back(name + ": no numeric frame suffix");
      continue;
    }
    if (!by_index.emplace(*index, file).second) {
      failures.push_back(name + ": duplicate frame index " + std::to_string(*index));
      if (!first_bad_frame) first_bad_frame = *index;
    }
  }

  KeypointSeries series;
  series.view = view;
  for (const auto& [index, file] : by_index) {
    try {
      series.frames.push_back(parse_openpose_frame(read_text_file(file), policy, index));
    } catch (const Error& e) {
      failures.push_back(file.filename().string() + " (frame " + std::to_string(index) +
                         "): " + e.what());
      if (!first_bad_frame) first_bad_frame = index;
    }
  }
  if (!failures.empty()) {
    std::string message = std::to_string(failures.size()) + " frame document(s) failed: ";
    for (std::size_t i = 0; i < failures.size(); ++i) {
      if (i > 0) message += "; ";
      message += failures[i];
    }
    throw Error(ErrorCode::FrameParseFailure, message, first_bad_frame);
  }
  return series;
}

}  // namespace

KeypointSeries load_series(const fs::path& source, View view, PersonPolicy policy) {
  std::error_code ec;
  if (!fs::exists(source, ec)) {
    throw Error(ErrorCode::EmptySource, "source does not exist: " + source.string());
  }
  if (fs::is_directory(source, ec)) return load_frame_directory(source, view, policy);

  const auto text = read_text_file(source);
  if (detail::trim(text).empty()) {
    throw Error(ErrorCode::EmptySource, "source file is empty: " + source.string());
  }
  if (source.extension() == ".json") {
    const long index = frame_index_from_filename(source.filename().string()).value_or(0);
    KeypointSeries series;
    series.view = view;
    series.frames.push_back(parse_openpose_frame(text, policy, index));
    return series;
  }
  return parse_series_csv(text, view);
}

void write_series_openpose(const KeypointSeries& series, const fs::path& directory,
                           std::string_view stem) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + directory.string());
  for (const auto& frame : series.frames) {
    char digits[32];
    std::snprintf(digits, sizeof(digits), "%012ld", frame.frame_index);
    const auto name = std::string(stem) + "_" + digits + "_keypoints.json";
    write_text_file(directory / name, format_openpose_frame(frame));
  }
}

}  // namespace aclrisk
