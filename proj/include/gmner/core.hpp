#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The gmner Authors

/**
 * @file core.hpp
 * @brief Domain types shared by every gmner module.
 *
 * A GMNER prediction is a list of (entity, type, location) triples, where the
 * location is either a pixel bounding box or Absent (rendered "None" in model
 * output). This header also hosts box geometry and the per-triple correctness
 * predicates used by the evaluation metrics.
 */

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gmner {

/// Raised when a value violates a domain invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box in image pixels, origin top-left.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const;

  /// Finite coordinates with x1 < x2 and y1 < y2.
  bool has_area() const;
  /// has_area() and every coordinate >= 0.
  bool valid() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Box or Absent. std::nullopt is the Absent variant.
using Location = std::optional<BBox>;

inline constexpr Location kAbsent = std::nullopt;

class EntityType {
 public:
  enum class Kind { Person, Organization, Location, Miscellaneous, Other };

  EntityType() = default;
  EntityType(Kind kind) : kind_(kind) {}  // NOLINT: implicit from canonical kinds

  /// Case-insensitive for the four canonical labels; anything else becomes Other(text).
  static EntityType parse(std::string_view text);
  static EntityType other(std::string text);

  Kind kind() const { return kind_; }
  bool canonical() const { return kind_ != Kind::Other; }
  /// Canonical lowercase label, or the raw text of an Other type.
  std::string str() const;

  /// Structural equality (Other("team") == Other("team")).
  friend bool operator==(const EntityType&, const EntityType&) = default;

 private:
  Kind kind_ = Kind::Other;
  std::string other_text_;
};

/// Type agreement as scored by rewards and metrics: Other never matches anything.
bool types_match(const EntityType& predicted, const EntityType& gold);

struct EntityTriple {
  std::string entity;
  EntityType etype;
  Location loc;

  /// Throws ValidationError when the entity is blank.
  void validate() const;

  friend bool operator==(const EntityTriple&, const EntityTriple&) = default;
};

struct GmnerSample {
  std::string id;
  std::string sentence;
  std::string image_ref;
  int image_width = 0;
  int image_height = 0;
  std::vector<EntityTriple> gold;

  /// Positive dimensions, valid triples, gold boxes within the image.
  void validate() const;

  friend bool operator==(const GmnerSample&, const GmnerSample&) = default;
};

enum class TaskMode { GMNER, MNER, EEG };

std::string_view to_string(TaskMode mode);
/// Accepts "gmner", "mner", "eeg" in any case.
TaskMode parse_task_mode(std::string_view text);

/// Trim and collapse internal whitespace runs to one space.
std::string normalize_entity(std::string_view text);

/// Intersection over union. Throws ValidationError if either box has no area.
double iou(const BBox& a, const BBox& b);

/// iou() that scores degenerate boxes as 0 instead of throwing.
double iou_or_zero(const BBox& a, const BBox& b);

inline constexpr double kDefaultIouThreshold = 0.5;

/// Location agreement: both Absent, or both boxes with IoU >= threshold.
bool location_correct(const Location& predicted, const Location& gold,
                      double iou_threshold = kDefaultIouThreshold);

/// GMNER: entity, type and location; MNER: entity and type; EEG: entity and location.
bool triple_correct(const EntityTriple& predicted, const EntityTriple& gold,
                    TaskMode mode, double iou_threshold = kDefaultIouThreshold);

/**
 * Clamp a box into [0, width] x [0, height].
 *
 * Returns true if any coordinate moved. The result may be degenerate when the
 * box lies entirely outside the image; callers score such boxes as never
 * correct.
 */
bool clamp_to_image(BBox& box, int width, int height);

}  // namespace gmner
