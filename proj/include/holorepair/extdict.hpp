#pragma once

#include <map>
#include <string>
#include <vector>

#include "holorepair/constraints.hpp"
#include "holorepair/dataset.hpp"
#include "holorepair/domain.hpp"

namespace holorepair {

/// One external dictionary: a CSV table registered under an id.
struct ExtDict {
    std::string id;
    std::vector<std::string> attributes;
    std::vector<std::vector<Value>> rows;

    int find_attribute(const std::string& name) const;
};

/// A dictionary row satisfied every condition of a matching dependency for
/// this dataset tuple; the row's source attribute suggests a value.
struct MatchedFact {
    Cell cell;
    std::string value;
    std::string dict_id;
    friend bool operator==(const MatchedFact&, const MatchedFact&) = default;
};

class DictRegistry {
public:
    /// Duplicate ids are an error; an empty dictionary loads with a warning.
    void load(const std::string& path, const std::string& id);
    void add(ExtDict dict);
    const ExtDict& get(const std::string& id) const;
    bool empty() const { return dicts_.empty(); }

private:
    std::map<std::string, ExtDict> dicts_;
};

/// Evaluate matching dependencies against initial values. Exact conditions
/// compare canonicalized strings; similar conditions use normalized edit
/// similarity against the threshold. Facts are set-deduplicated; conflicting
/// suggestions for the same cell are all kept.
std::vector<MatchedFact> match_dependencies(const Dataset& dataset, const DictRegistry& dicts,
                                            const std::vector<MatchingDependency>& mds,
                                            double sim_threshold);

/// Matched values are concrete repair suggestions: add them to the target
/// cell's candidate set (when the cell has one) and restore the canonical
/// candidate ordering.
void extend_domains(DomainMap& domains, const std::vector<MatchedFact>& facts,
                    const Dataset& dataset, const CoocTable& table);

}  // namespace holorepair
