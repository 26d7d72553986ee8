// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

#include "gmner/core.hpp"

#include <algorithm>
#include <cmath>

#include "text_util.hpp"

namespace gmner {

double BBox::area() const { return has_area() ? width() * height() : 0.0; }

bool BBox::has_area() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 < x2 && y1 < y2;
}

bool BBox::valid() const { return has_area() && x1 >= 0 && y1 >= 0; }

EntityType EntityType::parse(std::string_view text) {
  const std::string key = detail::ascii_lower(detail::trim(text));
  if (key == "person") return Kind::Person;
  if (key == "organization") return Kind::Organization;
  if (key == "location") return Kind::Location;
  if (key == "miscellaneous") return Kind::Miscellaneous;
  return other(std::string(detail::trim(text)));
}

EntityType EntityType::other(std::string text) {
  EntityType t;
  t.kind_ = Kind::Other;
  t.other_text_ = std::move(text);
  return t;
}

std::string EntityType::str() const {
  switch (kind_) {
    case Kind::Person: return "person";
    case Kind::Organization: return "organization";
    case Kind::Location: return "location";
    case Kind::Miscellaneous: return "miscellaneous";
    case Kind::Other: return other_text_;
  }
  return other_text_;
}

bool types_match(const EntityType& predicted, const EntityType& gold) {
  return predicted.canonical() && predicted.kind() == gold.kind();
}

void EntityTriple::validate() const {
  if (detail::trim(entity).empty()) {
    throw ValidationError("entity text is empty");
  }
}

void GmnerSample::validate() const {
  if (image_width <= 0 || image_height <= 0) {
    throw ValidationError("sample '" + id + "': image dimensions must be positive");
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& t = gold[i];
    try {
      t.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("sample '" + id + "' gold[" + std::to_string(i) + "]: " + e.what());
    }
    if (!t.loc) continue;
    const BBox& b = *t.loc;
    if (!b.valid()) {
      throw ValidationError("sample '" + id + "' gold[" + std::to_string(i) +
                            "]: box must satisfy 0 <= x1 < x2 and 0 <= y1 < y2");
    }
    if (b.x2 > image_width || b.y2 > image_height) {
      throw ValidationError("sample '" + id + "' gold[" + std::to_string(i) +
                            "]: box exceeds image bounds " + std::to_string(image_width) + "x" +
                            std::to_string(image_height));
    }
  }
}

std::string_view to_string(TaskMode mode) {
  switch (mode) {
    case TaskMode::GMNER: return "gmner";
    case TaskMode::MNER: return "mner";
    case TaskMode::EEG: return "eeg";
  }
  return "gmner";
}

TaskMode parse_task_mode(std::string_view text) {
  const std::string key = detail::ascii_lower(detail::trim(text));
  if (key == "gmner") return TaskMode::GMNER;
  if (key == "mner") return TaskMode::MNER;
  if (key == "eeg") return TaskMode::EEG;
  throw ValidationError("unknown task mode '" + std::string(text) + "' (expected gmner, mner or eeg)");
}

std::string normalize_entity(std::string_view text) { return detail::collapse_whitespace(text); }

double iou(const BBox& a, const BBox& b) {
  if (!a.has_area() || !b.has_area()) {
    throw ValidationError("iou: degenerate box (zero area or non-finite coordinates)");
  }
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_or_zero(const BBox& a, const BBox& b) {
  if (!a.has_area() || !b.has_area()) return 0.0;
  return iou(a, b);
}

namespace {

void check_threshold(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw ValidationError("iou threshold must lie in (0, 1]");
  }
}

}  // namespace

bool location_correct(const Location& predicted, const Location& gold, double iou_threshold) {
  check_threshold(iou_threshold);
  if (!predicted && !gold) return true;
  if (!predicted || !gold) return false;
  return iou_or_zero(*predicted, *gold) >= iou_threshold;
}

bool triple_correct(const EntityTriple& predicted, const EntityTriple& gold, TaskMode mode,
                    double iou_threshold) {
  check_threshold(iou_threshold);
  if (normalize_entity(predicted.entity) != normalize_entity(gold.entity)) return false;
  switch (mode) {
    case TaskMode::GMNER:
      return types_match(predicted.etype, gold.etype) &&
             location_correct(predicted.loc, gold.loc, iou_threshold);
    case TaskMode::MNER:
      return types_match(predicted.etype, gold.etype);
    case TaskMode::EEG:
      return location_correct(predicted.loc, gold.loc, iou_threshold);
  }
  return false;
}

bool clamp_to_image(BBox& box, int width, int height) {
  const BBox before = box;
  const double w = static_cast<double>(width);
  const double h = static_cast<double>(height);
  box.x1 = std::clamp(box.x1, 0.0, w);
  box.x2 = std::clamp(box.x2, 0.0, w);
  box.y1 = std::clamp(box.y1, 0.0, h);
  box.y2 = std::clamp(box.y2, 0.0, h);
  return !(box == before);
}

}  // namespace gmner
