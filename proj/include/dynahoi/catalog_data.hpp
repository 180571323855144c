#pragma once

// Built-in copy of data/motion_catalog.json.

namespace dynahoi {

inline constexpr const char* kDefaultCatalogJson = R"json({
  "checksum": "ee5f615bd7b493e4",
  "objects": [
    {
      "dims": {
        "radius": [
          0.032,
          0.035
        ]
      },
      "kind": "sphere",
      "name": "tennis_ball"
    },
    {
      "dims": {
        "radius": [
          0.036,
          0.038
        ]
      },
      "kind": "sphere",
      "name": "baseball"
    },
    {
      "dims": {
        "radius": [
          0.035,
          0.045
        ]
      },
      "kind": "sphere",
      "name": "apple"
    },
    {
      "dims": {
        "radius": [
          0.035,
          0.045
        ]
      },
      "kind": "sphere",
      "name": "orange"
    },
    {
      "dims": {
        "radius": [
          0.03,
          0.04
        ]
      },
      "kind": "sphere",
      "name": "peach"
    },
    {
      "dims": {
        "half_x": [
          0.025,
          0.035
        ],
        "half_y": [
          0.025,
          0.035
        ],
        "half_z": [
          0.025,
          0.035
        ]
      },
      "kind": "box",
      "name": "cube"
    },
    {
      "dims": {
        "half_x": [
          0.02,
          0.03
        ],
        "half_y": [
          0.02,
          0.03
        ],
        "half_z": [
          0.02,
          0.03
        ]
      },
      "kind": "box",
      "name": "toy_block"
    },
    {
      "dims": {
        "half_x": [
          0.04,
          0.05
        ],
        "half_y": [
          0.03,
          0.04
        ],
        "half_z": [
          0.025,
          0.03
        ]
      },
      "kind": "box",
      "name": "small_box"
    },
    {
      "dims": {
        "half_height": [
          0.05,
          0.065
        ],
        "radius": [
          0.03,
          0.035
        ]
      },
      "kind": "cylinder",
      "name": "can"
    },
    {
      "dims": {
        "half_height": [
          0.08,
          0.11
        ],
        "radius": [
          0.03,
          0.04
        ]
      },
      "kind": "cylinder",
      "name": "bottle"
    },
    {
      "dims": {
        "half_height": [
          0.045,
          0.055
        ],
        "radius": [
          0.035,
          0.045
        ]
      },
      "kind": "cylinder",
      "name": "cup"
    }
  ],
  "subcategories": [
    {
      "family": "StraightLine",
      "frames": [
        40,
        80
      ],
      "id": "line_slow",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "elevation": [
          -0.2,
          0.2
        ],
        "speed": [
          0.15,
          0.35
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "StraightLine",
      "frames": [
        30,
        50
      ],
      "id": "line_fast",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "elevation": [
          -0.2,
          0.2
        ],
        "speed": [
          0.4,
          0.7
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "StraightLine",
      "frames": [
        40,
        70
      ],
      "id": "line_diagonal",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "elevation": [
          0.4,
          0.8
        ],
        "speed": [
          0.2,
          0.4
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.6,
          1.0
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "SimpleHarmonic",
      "frames": [
        40,
        90
      ],
      "id": "harmonic_horizontal",
      "ranges": {
        "amplitude": [
          0.2,
          0.4
        ],
        "axis_azimuth": [
          0,
          6.283185307179586
        ],
        "axis_elevation": [
          0,
          0
        ],
        "omega": [
          1.5,
          3.0
        ],
        "phase": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "SimpleHarmonic",
      "frames": [
        40,
        90
      ],
      "id": "harmonic_vertical",
      "ranges": {
        "amplitude": [
          0.15,
          0.3
        ],
        "axis_azimuth": [
          0,
          0
        ],
        "axis_elevation": [
          1.5707963267948966,
          1.5707963267948966
        ],
        "omega": [
          1.5,
          3.0
        ],
        "phase": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "SimpleHarmonic",
      "frames": [
        40,
        70
      ],
      "id": "harmonic_fast",
      "ranges": {
        "amplitude": [
          0.15,
          0.3
        ],
        "axis_azimuth": [
          0,
          6.283185307179586
        ],
        "axis_elevation": [
          -0.3,
          0.3
        ],
        "omega": [
          3.5,
          6.0
        ],
        "phase": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "CircularArc",
      "frames": [
        50,
        100
      ],
      "id": "circular_slow",
      "ranges": {
        "clockwise": [
          0,
          1
        ],
        "omega": [
          0.6,
          1.2
        ],
        "plane_azimuth": [
          0,
          6.283185307179586
        ],
        "plane_tilt": [
          0,
          0
        ],
        "radius": [
          0.25,
          0.45
        ],
        "start_angle": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "CircularArc",
      "frames": [
        40,
        80
      ],
      "id": "circular_fast",
      "ranges": {
        "clockwise": [
          0,
          1
        ],
        "omega": [
          1.8,
          3.0
        ],
        "plane_azimuth": [
          0,
          6.283185307179586
        ],
        "plane_tilt": [
          0,
          0
        ],
        "radius": [
          0.2,
          0.4
        ],
        "start_angle": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "CircularArc",
      "frames": [
        50,
        100
      ],
      "id": "circular_vertical",
      "ranges": {
        "clockwise": [
          0,
          1
        ],
        "omega": [
          0.8,
          1.6
        ],
        "plane_azimuth": [
          0,
          6.283185307179586
        ],
        "plane_tilt": [
          1.5707963267948966,
          1.5707963267948966
        ],
        "radius": [
          0.2,
          0.4
        ],
        "start_angle": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          1.0,
          1.3
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Projectile",
      "frames": [
        26,
        32
      ],
      "id": "projectile_low",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "launch_angle": [
          1.38,
          1.46
        ],
        "speed": [
          4.4,
          5.0
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.6,
          1.0
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Projectile",
      "frames": [
        28,
        36
      ],
      "id": "projectile_high",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "launch_angle": [
          1.46,
          1.53
        ],
        "speed": [
          5.4,
          6.0
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.4,
          0.8
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Projectile",
      "frames": [
        26,
        34
      ],
      "id": "projectile_lob",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "launch_angle": [
          1.3,
          1.38
        ],
        "speed": [
          4.6,
          5.2
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.6,
          1.0
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Pendulum",
      "frames": [
        50,
        100
      ],
      "id": "pendulum_small",
      "ranges": {
        "initial_angle": [
          0.15,
          0.4
        ],
        "initial_rate": [
          -0.2,
          0.2
        ],
        "length": [
          0.5,
          0.9
        ],
        "swing_azimuth": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          1.6,
          2.0
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Pendulum",
      "frames": [
        50,
        100
      ],
      "id": "pendulum_large",
      "ranges": {
        "initial_angle": [
          0.8,
          1.4
        ],
        "initial_rate": [
          -0.5,
          0.5
        ],
        "length": [
          0.5,
          0.9
        ],
        "swing_azimuth": [
          0,
          6.283185307179586
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          1.6,
          2.0
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "InclinedRolling",
      "frames": [
        40,
        80
      ],
      "id": "incline_gentle",
      "ranges": {
        "downhill_azimuth": [
          0,
          6.283185307179586
        ],
        "incline_angle": [
          0.04,
          0.1
        ],
        "initial_speed": [
          0.0,
          0.15
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "InclinedRolling",
      "frames": [
        30,
        45
      ],
      "id": "incline_steep",
      "ranges": {
        "downhill_azimuth": [
          0,
          6.283185307179586
        ],
        "incline_angle": [
          0.16,
          0.26
        ],
        "initial_speed": [
          0.0,
          0.1
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          1.1,
          1.5
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "ImpactResponse",
      "frames": [
        30,
        50
      ],
      "id": "bounce_single",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "ground_height": [
          0.5,
          0.7
        ],
        "launch_angle": [
          -0.2,
          0.3
        ],
        "restitution": [
          0.3,
          0.5
        ],
        "speed": [
          0.3,
          0.6
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.9,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "ImpactResponse",
      "frames": [
        40,
        80
      ],
      "id": "bounce_multi",
      "ranges": {
        "azimuth": [
          0,
          6.283185307179586
        ],
        "ground_height": [
          0.5,
          0.7
        ],
        "launch_angle": [
          0.0,
          0.5
        ],
        "restitution": [
          0.6,
          0.85
        ],
        "speed": [
          0.3,
          0.6
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.9,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Hybrid",
      "frames": [
        50,
        90
      ],
      "id": "hybrid_line_arc",
      "pattern": "LA",
      "ranges": {
        "arc_share": [
          0.25,
          0.4
        ],
        "azimuth": [
          0,
          6.283185307179586
        ],
        "clockwise": [
          0,
          1
        ],
        "radius": [
          0.25,
          0.45
        ],
        "speed": [
          0.2,
          0.4
        ],
        "split": [
          0.3,
          0.5
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Hybrid",
      "frames": [
        50,
        90
      ],
      "id": "hybrid_arc_line",
      "pattern": "AL",
      "ranges": {
        "arc_share": [
          0.25,
          0.4
        ],
        "azimuth": [
          0,
          6.283185307179586
        ],
        "clockwise": [
          0,
          1
        ],
        "radius": [
          0.25,
          0.45
        ],
        "speed": [
          0.2,
          0.4
        ],
        "split": [
          0.3,
          0.5
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Hybrid",
      "frames": [
        60,
        100
      ],
      "id": "hybrid_lal",
      "pattern": "LAL",
      "ranges": {
        "arc_share": [
          0.25,
          0.4
        ],
        "azimuth": [
          0,
          6.283185307179586
        ],
        "clockwise": [
          0,
          1
        ],
        "radius": [
          0.25,
          0.45
        ],
        "speed": [
          0.2,
          0.4
        ],
        "split": [
          0.3,
          0.5
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    },
    {
      "family": "Hybrid",
      "frames": [
        50,
        100
      ],
      "id": "hybrid_stochastic",
      "pattern": "stochastic",
      "ranges": {
        "arc_share": [
          0.25,
          0.4
        ],
        "azimuth": [
          0,
          6.283185307179586
        ],
        "clockwise": [
          0,
          1
        ],
        "osc_amplitude": [
          0.01,
          0.04
        ],
        "osc_omega": [
          2.0,
          5.0
        ],
        "pattern_pick": [
          0,
          1
        ],
        "radius": [
          0.25,
          0.45
        ],
        "speed": [
          0.2,
          0.4
        ],
        "split": [
          0.3,
          0.5
        ],
        "x": [
          -0.4,
          0.4
        ],
        "y": [
          0.8,
          1.2
        ],
        "z": [
          1.0,
          1.6
        ]
      },
      "weight": 1.0
    }
  ],
  "version": 1
}
)json";

}  // namespace dynahoi
