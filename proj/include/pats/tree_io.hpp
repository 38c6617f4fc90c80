#pragma once

// Binary sidecar for PartitionTree, little-endian throughout:
//
//   char[4]  "PATS"
//   u16      version (= 1)
//   u32      width, height
//   u32      node count N, root id
//   N x { u32 left, u32 right, u32 parent, u64 area, u64 boundary_perimeter, f64 merge_distance }
//   width*height x u32 leaf id per pixel (row-major)
//
// Absent links are stored as 0xFFFFFFFF.

#include <pats/detail/binary_io.hpp>
#include <pats/partition_tree.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pats {

inline constexpr std::uint16_t kTreeFormatVersion = 1;

inline void write_tree(std::ostream& os, const PartitionTree& tree)
{
    os.write("PATS", 4);
    detail::write_le<std::uint16_t>(os, kTreeFormatVersion);
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tree.width));
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tree.height));
    detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(tree.nodes.size()));
    detail::write_le<std::uint32_t>(os, tree.root);
    for (const auto& n : tree.nodes) {
        detail::write_le<std::uint32_t>(os, n.left);
        detail::write_le<std::uint32_t>(os, n.right);
        detail::write_le<std::uint32_t>(os, n.parent);
        detail::write_le<std::uint64_t>(os, n.area);
        detail::write_le<std::uint64_t>(os, n.boundary_perimeter);
        detail::write_le<double>(os, n.merge_distance);
    }
    for (NodeId leaf : tree.leaf_of_pixel) {
        detail::write_le<std::uint32_t>(os, leaf);
    }
    if (!os) {
        throw std::runtime_error("write_tree: stream failure");
    }
}

/// Reads and structurally validates a sidecar.
inline PartitionTree read_tree(std::istream& is)
{
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "PATS", 4) != 0) {
        throw FormatError("not a PATS tree file");
    }
    const auto version = detail::read_le<std::uint16_t>(is);
    if (version != kTreeFormatVersion) {
        throw FormatError("unsupported tree format version " + std::to_string(version));
    }
    PartitionTree tree;
    tree.width = static_cast<int>(detail::read_le<std::uint32_t>(is));
    tree.height = static_cast<int>(detail::read_le<std::uint32_t>(is));
    const auto count = detail::read_le<std::uint32_t>(is);
    tree.root = detail::read_le<std::uint32_t>(is);
    if (tree.width <= 0 || tree.height <= 0 || count == 0 || count % 2 == 0 || tree.root >= count) {
        throw FormatError("corrupt tree header");
    }
    const std::uint64_t pixels = std::uint64_t(tree.width) * std::uint64_t(tree.height);
    if (count > 2 * pixels) {
        throw FormatError("corrupt tree header");
    }
    tree.nodes.resize(count);
    for (NodeId id = 0; id < count; ++id) {
        PartitionNode& n = tree.nodes[id];
        n.id = id;
        n.left = detail::read_le<std::uint32_t>(is);
        n.right = detail::read_le<std::uint32_t>(is);
        n.parent = detail::read_le<std::uint32_t>(is);
        n.area = detail::read_le<std::uint64_t>(is);
        n.boundary_perimeter = detail::read_le<std::uint64_t>(is);
        n.merge_distance = detail::read_le<double>(is);
        const bool leaf = n.left == kNoNode;
        if (leaf != (n.right == kNoNode) || (!leaf && (n.left >= id || n.right >= id)) ||
            (n.parent != kNoNode && (n.parent <= id || n.parent >= count)) || (n.parent == kNoNode) != (id == tree.root)) {
            throw FormatError("corrupt node record " + std::to_string(id));
        }
    }
    const std::size_t leaves = (count + 1) / 2;
    tree.leaf_of_pixel.resize(pixels);
    for (auto& leaf : tree.leaf_of_pixel) {
        leaf = detail::read_le<std::uint32_t>(is);
        if (leaf >= leaves || !tree.nodes[leaf].is_leaf()) {
            throw FormatError("pixel refers to a non-leaf node");
        }
    }
    return tree;
}

inline void save_tree(const std::string& path, const PartitionTree& tree)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_tree(os, tree);
}

inline PartitionTree load_tree(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_tree(is);
}

} // namespace pats
