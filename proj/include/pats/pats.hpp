#pragma once

// Core algorithms; no codec or network dependencies.

#include <pats/atomic_partition.hpp>
#include <pats/evaluation.hpp>
#include <pats/grasp.hpp>
#include <pats/image.hpp>
#include <pats/partition_tree.hpp>
#include <pats/pipeline.hpp>
#include <pats/point_cloud.hpp>
#include <pats/saliency.hpp>
#include <pats/selection.hpp>
#include <pats/tree_io.hpp>
