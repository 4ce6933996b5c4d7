#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itl/result.h"

namespace itl::world {

using EntityId = std::string;

enum class Color { kRed, kBlue, kGreen, kYellow };
enum class Shape { kCylinder, kTriangle, kCube, kSphere };
enum class Size { kSmall, kLarge };

inline constexpr std::array kColors = {Color::kRed, Color::kBlue, Color::kGreen, Color::kYellow};
inline constexpr std::array kShapes = {Shape::kCylinder, Shape::kTriangle, Shape::kCube,
                                       Shape::kSphere};
inline constexpr std::array kSizes = {Size::kSmall, Size::kLarge};

std::string_view to_string(Color c);
std::string_view to_string(Shape s);
std::string_view to_string(Size s);
std::optional<Color> parse_color(std::string_view s);
std::optional<Shape> parse_shape(std::string_view s);
std::optional<Size> parse_size(std::string_view s);

// The names the table-top domain uses. Puzzle boards add their own cells.
inline constexpr std::array<std::string_view, 4> kTabletopLocations = {"pantry", "garbage",
                                                                       "table", "stove"};

// Axis-aligned box in table coordinates (cm). Integer geometry keeps the
// simulator exactly deterministic.
struct Box {
  int x0 = 0, y0 = 0, z0 = 0;
  int x1 = 0, y1 = 0, z1 = 0;

  int lo(int axis) const { return axis == 0 ? x0 : axis == 1 ? y0 : z0; }
  int hi(int axis) const { return axis == 0 ? x1 : axis == 1 ? y1 : z1; }
  int extent(int axis) const { return hi(axis) - lo(axis); }
  bool degenerate() const { return x1 <= x0 || y1 <= y0 || z1 <= z0; }
  bool contains(const Box& inner) const;
  bool intersects(const Box& other) const;  // positive-volume overlap

  bool operator==(const Box&) const = default;
};

struct SceneObject {
  EntityId id;
  Color color = Color::kRed;
  Shape shape = Shape::kCube;
  Size size = Size::kSmall;
  Box bounds;

  bool operator==(const SceneObject&) const = default;
};

struct Location {
  std::string name;
  Box region;
  bool openable = false;
  bool open = false;  // meaningful only when openable
  bool powered = false;
  bool on = false;  // meaningful only when powered

  bool operator==(const Location&) const = default;
};

// Height of every location region and the z at which held objects float.
inline constexpr int kRegionHeight = 100;
inline constexpr int kGripperZ = 150;

class WorldState {
 public:
  WorldState() = default;

  const std::vector<SceneObject>& objects() const { return objects_; }
  const std::vector<Location>& locations() const { return locations_; }
  const std::optional<EntityId>& gripper() const { return gripper_; }
  long clock() const { return clock_; }

  const SceneObject* find_object(std::string_view id) const;
  const Location* find_location(std::string_view name) const;
  bool has_entity(std::string_view id) const;
  bool is_object(std::string_view id) const { return find_object(id) != nullptr; }
  bool is_location(std::string_view id) const { return find_location(id) != nullptr; }

  // Region whose box contains the object; empty when held.
  std::optional<std::string> location_of(std::string_view object_id) const;

  // Builders used by the scene loader and tests. The object is dropped onto
  // whatever already occupies its footprint inside the target region.
  void add_location(Location loc);
  void add_object(EntityId id, Color color, Shape shape, Size size, int cx, int cy, int width = 0,
                  int depth = 0, int height = 0);

  // Mutable access for test fixtures that need off-nominal states.
  Location* mutable_location(std::string_view name);
  SceneObject* mutable_object(std::string_view id);
  void set_gripper(std::optional<EntityId> held) { gripper_ = std::move(held); }

  // Human-readable list of violated invariants; empty when the state is legal.
  std::vector<std::string> check_invariants() const;

  bool operator==(const WorldState&) const = default;

 private:
  friend class Simulator;

  int stack_top(const Location& loc, const Box& footprint, std::string_view ignore) const;

  std::vector<SceneObject> objects_;
  std::vector<Location> locations_;
  std::optional<EntityId> gripper_;
  long clock_ = 0;
};

enum class PrimitiveKind { kPickUp, kPutDown, kOpen, kClose, kTurnOn, kTurnOff };

std::string_view to_string(PrimitiveKind k);
std::optional<PrimitiveKind> parse_primitive_kind(std::string_view s);

struct PrimitiveAction {
  PrimitiveKind kind = PrimitiveKind::kOpen;
  EntityId object;       // pick-up, put-down
  std::string relation;  // put-down
  EntityId location;     // put-down, open, close, turn-on, turn-off

  static PrimitiveAction pick_up(EntityId obj) { return {PrimitiveKind::kPickUp, std::move(obj), "", ""}; }
  static PrimitiveAction put_down(std::string rel, EntityId obj, EntityId loc) {
    return {PrimitiveKind::kPutDown, std::move(obj), std::move(rel), std::move(loc)};
  }
  static PrimitiveAction toggle(PrimitiveKind k, EntityId loc) { return {k, "", "", std::move(loc)}; }

  // pick-up(obj1), put-down(in,obj1,pantry), open(pantry)
  std::string to_string() const;
  static std::optional<PrimitiveAction> parse(std::string_view text);

  bool operator==(const PrimitiveAction&) const = default;
};

enum class ActionErrorKind {
  kPickWhileHolding,
  kPutWhileEmpty,
  kPutIntoClosed,
  kRedundantToggle,
  kUnknownEntity,
  kNotOpenable,
  kNotPowered,
  kNotHeld,
  kPickFromClosed,
  kUnsupportedRelation,
};

std::string_view to_string(ActionErrorKind k);

struct ActionError {
  ActionErrorKind kind;
  std::string message;
};

using ActionResult = Result<WorldState, ActionError>;

ActionResult apply_primitive(const WorldState& state, const PrimitiveAction& action);

struct SceneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line-oriented scene format:
//   object <id> <color> <shape> <size> <x> <y> [<w> <d> <h>]
//   location <name> <x0> <y0> <x1> <y1> [openable] [powered] [open] [on]
//   # comment
WorldState parse_scene(std::istream& in);
WorldState parse_scene_text(std::string_view text);
WorldState load_scene(const std::string& path);
std::string format_scene(const WorldState& state);

}  // namespace itl::world
