"""Indoor navigation stack.

Turns a visual-SLAM keyframe map into a binary occupancy grid, plans
grid paths with A*, simulates a differential-drive vehicle with a
forward-sector ray-cast LiDAR, follows paths with a deterministic
controller, and exposes the loop over a WebSocket session protocol.
"""

__version__ = "0.1.0"
