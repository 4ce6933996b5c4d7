#include "itl/world.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace itl::world {

namespace {

constexpr std::array<std::string_view, 4> kColorNames = {"red", "blue", "green", "yellow"};
constexpr std::array<std::string_view, 4> kShapeNames = {"cylinder", "triangle", "cube", "sphere"};
constexpr std::array<std::string_view, 2> kSizeNames = {"small", "large"};
constexpr std::array<std::string_view, 6> kPrimitiveNames = {"pick-up", "put-down", "open",
                                                             "close",   "turn-on",  "turn-off"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

int default_extent(Size s) { return s == Size::kSmall ? 4 : 6; }

ActionError fail(ActionErrorKind kind, std::string message) { return {kind, std::move(message)}; }

}  // namespace

std::string_view to_string(Color c) { return kColorNames[static_cast<int>(c)]; }
std::string_view to_string(Shape s) { return kShapeNames[static_cast<int>(s)]; }
std::string_view to_string(Size s) { return kSizeNames[static_cast<int>(s)]; }
std::optional<Color> parse_color(std::string_view s) { return lookup<Color>(kColorNames, s); }
std::optional<Shape> parse_shape(std::string_view s) { return lookup<Shape>(kShapeNames, s); }
std::optional<Size> parse_size(std::string_view s) { return lookup<Size>(kSizeNames, s); }

std::string_view to_string(PrimitiveKind k) { return kPrimitiveNames[static_cast<int>(k)]; }
std::optional<PrimitiveKind> parse_primitive_kind(std::string_view s) {
  return lookup<PrimitiveKind>(kPrimitiveNames, s);
}

std::string_view to_string(ActionErrorKind k) {
  switch (k) {
    case ActionErrorKind::kPickWhileHolding: return "PickWhileHolding";
    case ActionErrorKind::kPutWhileEmpty: return "PutWhileEmpty";
    case ActionErrorKind::kPutIntoClosed: return "PutIntoClosed";
    case ActionErrorKind::kRedundantToggle: return "RedundantToggle";
    case ActionErrorKind::kUnknownEntity: return "UnknownEntity";
    case ActionErrorKind::kNotOpenable: return "NotOpenable";
    case ActionErrorKind::kNotPowered: return "NotPowered";
    case ActionErrorKind::kNotHeld: return "NotHeld";
    case ActionErrorKind::kPickFromClosed: return "PickFromClosed";
    case ActionErrorKind::kUnsupportedRelation: return "UnsupportedRelation";
  }
  return "?";
}

bool Box::contains(const Box& inner) const {
  for (int a = 0; a < 3; ++a) {
    if (inner.lo(a) < lo(a) || inner.hi(a) > hi(a)) return false;
  }
  return true;
}

bool Box::intersects(const Box& other) const {
  for (int a = 0; a < 3; ++a) {
    if (std::min(hi(a), other.hi(a)) <= std::max(lo(a), other.lo(a))) return false;
  }
  return true;
}

const SceneObject* WorldState::find_object(std::string_view id) const {
  for (const auto& o : objects_) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const Location* WorldState::find_location(std::string_view name) const {
  for (const auto& l : locations_) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

SceneObject* WorldState::mutable_object(std::string_view id) {
  return const_cast<SceneObject*>(find_object(id));
}

Location* WorldState::mutable_location(std::string_view name) {
  return const_cast<Location*>(find_location(name));
}

bool WorldState::has_entity(std::string_view id) const { return is_object(id) || is_location(id); }

std::optional<std::string> WorldState::location_of(std::string_view object_id) const {
  const SceneObject* obj = find_object(object_id);
  if (obj == nullptr) return std::nullopt;
  for (const auto& loc : locations_) {
    if (loc.region.contains(obj->bounds)) return loc.name;
  }
  return std::nullopt;
}

int WorldState::stack_top(const Location& loc, const Box& footprint, std::string_view ignore) const {
  int top = loc.region.z0;
  for (const auto& o : objects_) {
    if (o.id == ignore || !loc.region.contains(o.bounds)) continue;
    bool overlaps_xy = std::min(o.bounds.x1, footprint.x1) > std::max(o.bounds.x0, footprint.x0) &&
                       std::min(o.bounds.y1, footprint.y1) > std::max(o.bounds.y0, footprint.y0);
    if (overlaps_xy) top = std::max(top, o.bounds.z1);
  }
  return top;
}

void WorldState::add_location(Location loc) {
  if (loc.region.degenerate()) throw SceneError("degenerate region for location " + loc.name);
  if (has_entity(loc.name)) throw SceneError("duplicate entity " + loc.name);
  for (const auto& other : locations_) {
    if (other.region.intersects(loc.region)) {
      throw SceneError("location " + loc.name + " overlaps " + other.name);
    }
  }
  if (!loc.openable) loc.open = false;
  if (!loc.powered) loc.on = false;
  locations_.push_back(std::move(loc));
}

void WorldState::add_object(EntityId id, Color color, Shape shape, Size size, int cx, int cy,
                            int width, int depth, int height) {
  if (has_entity(id)) throw SceneError("duplicate entity " + id);
  const int w = width > 0 ? width : default_extent(size);
  const int d = depth > 0 ? depth : default_extent(size);
  const int h = height > 0 ? height : default_extent(size);
  Box box{cx - w / 2, cy - d / 2, 0, cx - w / 2 + w, cy - d / 2 + d, h};
  const Location* home = nullptr;
  for (const auto& loc : locations_) {
    if (loc.region.x0 <= box.x0 && box.x1 <= loc.region.x1 && loc.region.y0 <= box.y0 &&
        box.y1 <= loc.region.y1) {
      home = &loc;
      break;
    }
  }
  if (home == nullptr) throw SceneError("object " + id + " is not inside any location");
  const int z = stack_top(*home, box, id);
  box.z0 = z;
  box.z1 = z + h;
  if (box.z1 > home->region.z1) throw SceneError("stack overflows location " + home->name);
  objects_.push_back(SceneObject{std::move(id), color, shape, size, box});
}

std::vector<std::string> WorldState::check_invariants() const {
  std::vector<std::string> out;
  if (gripper_ && find_object(*gripper_) == nullptr) {
    out.push_back("gripper holds unknown object " + *gripper_);
  }
  for (const auto& o : objects_) {
    if (o.bounds.degenerate()) out.push_back("degenerate bounds for " + o.id);
    const bool held = gripper_ && *gripper_ == o.id;
    int homes = 0;
    for (const auto& loc : locations_) homes += loc.region.contains(o.bounds) ? 1 : 0;
    if (held && homes != 0) out.push_back("held object " + o.id + " still inside a location");
    if (!held && homes != 1) out.push_back("object " + o.id + " is inside " + std::to_string(homes) + " locations");
  }
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    const auto& l = locations_[i];
    if (!l.openable && l.open) out.push_back("non-openable " + l.name + " flagged open");
    if (!l.powered && l.on) out.push_back("unpowered " + l.name + " flagged on");
    for (std::size_t j = i + 1; j < locations_.size(); ++j) {
      if (l.region.intersects(locations_[j].region)) {
        out.push_back("regions " + l.name + " and " + locations_[j].name + " overlap");
      }
    }
  }
  return out;
}

std::string PrimitiveAction::to_string() const {
  std::string name(world::to_string(kind));
  switch (kind) {
    case PrimitiveKind::kPickUp: return name + "(" + object + ")";
    case PrimitiveKind::kPutDown: return name + "(" + relation + "," + object + "," + location + ")";
    default: return name + "(" + location + ")";
  }
}

std::optional<PrimitiveAction> PrimitiveAction::parse(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
  auto kind = parse_primitive_kind(text.substr(0, open));
  if (!kind) return std::nullopt;
  std::vector<std::string> args;
  std::string cur;
  for (char c : text.substr(open + 1, text.size() - open - 2)) {
    if (c == ',') {
      args.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  args.push_back(cur);
  switch (*kind) {
    case PrimitiveKind::kPickUp:
      if (args.size() != 1) return std::nullopt;
      return pick_up(args[0]);
    case PrimitiveKind::kPutDown:
      if (args.size() != 3) return std::nullopt;
      return put_down(args[0], args[1], args[2]);
    default:
      if (args.size() != 1) return std::nullopt;
      return toggle(*kind, args[0]);
  }
}

class Simulator {
 public:
  static ActionResult apply(const WorldState& state, const PrimitiveAction& a) {
    WorldState next = state;
    switch (a.kind) {
      case PrimitiveKind::kPickUp: {
        SceneObject* obj = next.mutable_object(a.object);
        if (obj == nullptr) return fail(ActionErrorKind::kUnknownEntity, "no object " + a.object);
        if (next.gripper_) return fail(ActionErrorKind::kPickWhileHolding, "already holding " + *next.gripper_);
        if (auto home = state.location_of(a.object)) {
          const Location* loc = state.find_location(*home);
          if (loc->openable && !loc->open) {
            return fail(ActionErrorKind::kPickFromClosed, *home + " is closed");
          }
        }
        const int h = obj->bounds.extent(2);
        obj->bounds.z0 = kGripperZ;
        obj->bounds.z1 = kGripperZ + h;
        next.gripper_ = a.object;
        break;
      }
      case PrimitiveKind::kPutDown: {
        if (!next.gripper_) return fail(ActionErrorKind::kPutWhileEmpty, "gripper is empty");
        if (*next.gripper_ != a.object) return fail(ActionErrorKind::kNotHeld, a.object + " is not held");
        if (a.relation != "in") {
          return fail(ActionErrorKind::kUnsupportedRelation, "cannot place " + a.relation);
        }
        const Location* loc = next.find_location(a.location);
        if (loc == nullptr) return fail(ActionErrorKind::kUnknownEntity, "no location " + a.location);
        if (loc->openable && !loc->open) return fail(ActionErrorKind::kPutIntoClosed, a.location + " is closed");
        SceneObject* obj = next.mutable_object(a.object);
        const int w = obj->bounds.extent(0), d = obj->bounds.extent(1), h = obj->bounds.extent(2);
        const int cx = (loc->region.x0 + loc->region.x1) / 2;
        const int cy = (loc->region.y0 + loc->region.y1) / 2;
        Box box{cx - w / 2, cy - d / 2, 0, cx - w / 2 + w, cy - d / 2 + d, 0};
        const int z = next.stack_top(*loc, box, a.object);
        box.z0 = z;
        box.z1 = z + h;
        obj->bounds = box;
        next.gripper_.reset();
        break;
      }
      case PrimitiveKind::kOpen:
      case PrimitiveKind::kClose: {
        Location* loc = next.mutable_location(a.location);
        if (loc == nullptr) return fail(ActionErrorKind::kUnknownEntity, "no location " + a.location);
        if (!loc->openable) return fail(ActionErrorKind::kNotOpenable, a.location + " cannot be opened");
        const bool want = a.kind == PrimitiveKind::kOpen;
        if (loc->open == want) {
          return fail(ActionErrorKind::kRedundantToggle,
                      a.location + " is already " + (want ? "open" : "closed"));
        }
        loc->open = want;
        break;
      }
      case PrimitiveKind::kTurnOn:
      case PrimitiveKind::kTurnOff: {
        Location* loc = next.mutable_location(a.location);
        if (loc == nullptr) return fail(ActionErrorKind::kUnknownEntity, "no location " + a.location);
        if (!loc->powered) return fail(ActionErrorKind::kNotPowered, a.location + " has no power");
        const bool want = a.kind == PrimitiveKind::kTurnOn;
        if (loc->on == want) {
          return fail(ActionErrorKind::kRedundantToggle,
                      a.location + " is already " + (want ? "on" : "off"));
        }
        loc->on = want;
        break;
      }
    }
    ++next.clock_;
    return next;
  }
};

ActionResult apply_primitive(const WorldState& state, const PrimitiveAction& action) {
  return Simulator::apply(state, action);
}

WorldState parse_scene(std::istream& in) {
  WorldState state;
  std::string line;
  int lineno = 0;
  auto error = [&](const std::string& what) {
    return SceneError("scene line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto to_int = [&](const std::string& s) {
      try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw error("bad number '" + s + "'");
        return v;
      } catch (const std::logic_error&) {
        throw error("bad number '" + s + "'");
      }
    };
    try {
      if (tok[0] == "object") {
        if (tok.size() != 7 && tok.size() != 10) throw error("object needs 6 or 9 fields");
        auto color = parse_color(tok[2]);
        auto shape = parse_shape(tok[3]);
        auto size = parse_size(tok[4]);
        if (!color || !shape || !size) throw error("unknown attribute value");
        int w = 0, d = 0, h = 0;
        if (tok.size() == 10) {
          w = to_int(tok[7]);
          d = to_int(tok[8]);
          h = to_int(tok[9]);
        }
        state.add_object(tok[1], *color, *shape, *size, to_int(tok[5]), to_int(tok[6]), w, d, h);
      } else if (tok[0] == "location") {
        if (tok.size() < 6) throw error("location needs a name and 4 coordinates");
        Location loc;
        loc.name = tok[1];
        loc.region = Box{to_int(tok[2]), to_int(tok[3]), 0, to_int(tok[4]), to_int(tok[5]), kRegionHeight};
        for (std::size_t i = 6; i < tok.size(); ++i) {
          if (tok[i] == "openable") loc.openable = true;
          else if (tok[i] == "powered") loc.powered = true;
          else if (tok[i] == "open") loc.open = true;
          else if (tok[i] == "on") loc.on = true;
          else throw error("unknown location flag " + tok[i]);
        }
        if (loc.open && !loc.openable) throw error("open flag on non-openable location");
        if (loc.on && !loc.powered) throw error("on flag on unpowered location");
        state.add_location(std::move(loc));
      } else if (tok[0] == "hold") {
        if (tok.size() != 2) throw error("hold needs an object id");
        auto next = apply_primitive(state, PrimitiveAction::pick_up(tok[1]));
        if (!next) throw error(next.error().message);
        state = std::move(next).value();
      } else {
        throw error("unknown directive " + tok[0]);
      }
    } catch (const SceneError& e) {
      if (std::string_view(e.what()).starts_with("scene line")) throw;
      throw error(e.what());
    }
  }
  return state;
}

WorldState parse_scene_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_scene(in);
}

WorldState load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file " + path);
  return parse_scene(in);
}

std::string format_scene(const WorldState& state) {
  std::ostringstream out;
  for (const auto& l : state.locations()) {
    out << "location " << l.name << ' ' << l.region.x0 << ' ' << l.region.y0 << ' ' << l.region.x1
        << ' ' << l.region.y1;
    if (l.openable) out << " openable";
    if (l.powered) out << " powered";
    if (l.open) out << " open";
    if (l.on) out << " on";
    out << '\n';
  }
  // Emit bottom-up so restacking on load reproduces the same heights.
  std::vector<const SceneObject*> order;
  for (const auto& o : state.objects()) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(), [](const SceneObject* a, const SceneObject* b) {
    return a->bounds.z0 < b->bounds.z0;
  });
  // A held object keeps its x/y when lifted, so it can be re-created at that
  // footprint and then picked up again.
  std::stable_partition(order.begin(), order.end(), [&](const SceneObject* o) {
    return !(state.gripper() && *state.gripper() == o->id);
  });
  for (const SceneObject* o : order) {
    const auto& b = o->bounds;
    out << "object " << o->id << ' ' << to_string(o->color) << ' ' << to_string(o->shape) << ' '
        << to_string(o->size) << ' ' << b.x0 + b.extent(0) / 2 << ' ' << b.y0 + b.extent(1) / 2;
    const int std_extent = default_extent(o->size);
    if (b.extent(0) != std_extent || b.extent(1) != std_extent || b.extent(2) != std_extent) {
      out << ' ' << b.extent(0) << ' ' << b.extent(1) << ' ' << b.extent(2);
    }
    out << '\n';
  }
  if (state.gripper()) out << "hold " << *state.gripper() << '\n';
  return out.str();
}

}  // namespace itl::world
