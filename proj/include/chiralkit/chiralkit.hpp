#pragma once

// Chirality calculus for camera arrangements: the chiral domain and its
// LP-based nonemptiness test, the chiral joint image inequalities, and the
// cone-duality decision for upgrading projective or Euclidean
// reconstructions to chiral ones.

#include "chiralkit/base.hpp"
#include "chiralkit/lp.hpp"
#include "chiralkit/camera.hpp"
#include "chiralkit/arrangement.hpp"
#include "chiralkit/joint_image.hpp"
#include "chiralkit/reconstruction.hpp"
#include "chiralkit/euclidean.hpp"
#include "chiralkit/oracle.hpp"
