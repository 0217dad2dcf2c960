#pragma once

#include <string>

#include "blockout/network.hpp"

namespace blockout {

// Network checkpoint, little-endian:
//   magic "BLKO" | u16 version=1 | u16 layer count | per layer:
//     u8 type tag (0 dense, 1 blockout, 2 relu, 3 softmax-loss)
//     dense:    u32 d_out, u32 d_in, f64 W (row-major), f64 bias
//     blockout: u32 d_out, u32 d_in, u32 k, u8 shared_in,
//               f64 W~, f64 bias, f64 theta_out (d_out x k),
//               f64 theta_in (d_in x k, only when shared_in = 0)
//     relu:     u32 width
//     softmax:  u32 classes
// Parameters round-trip bit for bit. Optimizer state (velocities) is not
// captured; a loaded network starts with zeroed momentum.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace blockout
