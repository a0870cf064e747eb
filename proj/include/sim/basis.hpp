#pragma once

#include "sim/errors.hpp"

#include <string>

namespace sim {

/// One-excitation-space basis over one or two interface nodes.
///
/// State layout: index 0 is the shared ground sink; each node contributes a
/// contiguous block [QubitExcited, SpinExcited(1..Ng), CavityPhoton]. With
/// `opticalExcited` the per-node block is extended by the optical excited
/// manifold [SpinOptical(1..Ng)] placed between the spins and the photon,
/// which is what the un-eliminated three-level oracle model runs on.
class OesBasis {
public:
    OesBasis(int nodes, int groupsPerNode, bool opticalExcited = false)
        : nodes_(nodes), groups_(groupsPerNode), optical_(opticalExcited) {
        if (nodes != 1 && nodes != 2)
            throw ConfigError("OesBasis: nodes must be 1 or 2");
        if (groupsPerNode < 1)
            throw ConfigError("OesBasis: need at least one spin group");
        if (optical_ && nodes != 1)
            throw ConfigError("OesBasis: optical-excited basis is single-node only");
    }

    int nodes() const { return nodes_; }
    int groupsPerNode() const { return groups_; }
    bool hasOpticalExcited() const { return optical_; }

    int blockSize() const { return optical_ ? 2 * groups_ + 2 : groups_ + 2; }
    int dimension() const { return 1 + nodes_ * blockSize(); }

    int groundSink() const { return 0; }
    int qubit(int node = 0) const { return 1 + check(node) * blockSize(); }
    int spin(int group, int node = 0) const {
        checkGroup(group);
        return qubit(node) + 1 + group;
    }
    int spinOptical(int group, int node = 0) const {
        if (!optical_) throw ConfigError("OesBasis: no optical-excited states in this basis");
        checkGroup(group);
        return qubit(node) + 1 + groups_ + group;
    }
    int cavity(int node = 0) const { return qubit(node) + blockSize() - 1; }

    bool operator==(const OesBasis& o) const {
        return nodes_ == o.nodes_ && groups_ == o.groups_ && optical_ == o.optical_;
    }
    bool operator!=(const OesBasis& o) const { return !(*this == o); }

private:
    int check(int node) const {
        if (node < 0 || node >= nodes_)
            throw ConfigError("OesBasis: node index " + std::to_string(node) + " out of range");
        return node;
    }
    void checkGroup(int group) const {
        if (group < 0 || group >= groups_)
            throw ConfigError("OesBasis: spin group " + std::to_string(group) + " out of range");
    }

    int nodes_;
    int groups_;
    bool optical_;
};

} // namespace sim
