#pragma once

#include "ptrack/geometry.hpp"

#include <numeric>
#include <vector>

namespace ptrack {

struct WeightedParticle {
  TargetState state = TargetState::Zero();
  double weight = 0.0;
};

/// Persistent particles approximate the PHD of surviving targets, newborn
/// particles that of targets born this scan.
enum class ParticleKind { persistent, newborn };

struct ParticleSystem {
  std::vector<WeightedParticle> particles;
  ParticleKind kind = ParticleKind::persistent;

  std::size_t size() const { return particles.size(); }
  bool empty() const { return particles.empty(); }

  /// Weight sum, accumulated in index order.
  double mass() const {
    return std::accumulate(particles.begin(), particles.end(), 0.0,
                           [](double acc, const WeightedParticle& p) { return acc + p.weight; });
  }
};

/// Axis-aligned area of interest.
struct Rectangle {
  Vector2 lower = Vector2::Zero();
  Vector2 upper = Vector2::Zero();

  Vector2 center() const { return 0.5 * (lower + upper); }
  Vector2 extent() const { return upper - lower; }
  bool contains(const Vector2& p) const {
    return (p.array() >= lower.array()).all() && (p.array() <= upper.array()).all();
  }
};

}  // namespace ptrack
