#pragma once

// Everything except PNG I/O (png_io.hpp, which needs libpng).
#include "carigeo/adam.hpp"
#include "carigeo/autodiff.hpp"
#include "carigeo/checkpoint.hpp"
#include "carigeo/dense_net.hpp"
#include "carigeo/error.hpp"
#include "carigeo/gradcheck.hpp"
#include "carigeo/image.hpp"
#include "carigeo/inference.hpp"
#include "carigeo/io.hpp"
#include "carigeo/landmarks.hpp"
#include "carigeo/losses.hpp"
#include "carigeo/model.hpp"
#include "carigeo/pca.hpp"
#include "carigeo/pipeline.hpp"
#include "carigeo/rng.hpp"
#include "carigeo/shape_core.hpp"
#include "carigeo/synth.hpp"
#include "carigeo/tps.hpp"
#include "carigeo/train.hpp"
#include "carigeo/warp.hpp"
