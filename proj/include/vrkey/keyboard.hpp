#pragma once

// 47-key virtual keyboard: per-key quads in keyboard-local space plus the
// pose rule that anchors the board to the player at keyboard-open time.
//
// Local frame: x right (player's view), y in-plane away from the player,
// z normal toward the player. Keys lie in the z=0 plane. Row 1 is nearest.

#include <optional>
#include <string>
#include <vector>

#include "vrkey/geometry.hpp"

namespace vrkey {

struct Key {
    std::string label;  // single character, or "space"
    int row = 1;        // 1 (nearest) .. 4 (farthest)
    Vec3 center;        // keyboard-local
    Quad quad;          // keyboard-local
};

struct KeyboardModel {
    std::vector<Key> keys;
    double key_side = 0.03;
    double pitch = 0.032;
    Transform pose_rule;  // yaw-flattened player pose -> keyboard pose

    static constexpr int kKeyCount = 47;

    static KeyboardModel default_model();
    static Transform default_pose_rule(double forward = 0.45, double down = 0.25,
                                       double tilt_deg = 45.0);

    static KeyboardModel load_layout(const std::string& path);
    void save_layout(const std::string& path) const;
    std::string layout_text() const;
    static KeyboardModel from_layout_text(const std::string& text);

    int index_of(const std::string& label) const;  // -1 if absent
    int index_of_char(char c) const;
    std::optional<char> char_of(int key_index) const;

    // Keyboard pose for a player pose captured at keyboard-open time.
    Transform place(const Transform& player_pose) const;
    Quad world_quad(int key_index, const Transform& keyboard_pose) const;
    Vec3 world_center(int key_index, const Transform& keyboard_pose) const;
};

}  // namespace vrkey
