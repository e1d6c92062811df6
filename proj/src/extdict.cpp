#include "holorepair/extdict.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "holorepair/csv.hpp"
#include "holorepair/errors.hpp"

namespace holorepair {

int ExtDict::find_attribute(const std::string& name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i] == name) return static_cast<int>(i);
    return -1;
}

void DictRegistry::load(const std::string& path, const std::string& id) {
    csv::Table t = csv::read_file(path);
    ExtDict d;
    d.id = id;
    d.attributes = t.header;
    std::set<std::string> seen(t.header.begin(), t.header.end());
    if (seen.size() != t.header.size())
        throw LoadError(path + ": duplicate attribute in dictionary header");
    for (const auto& raw : t.rows) {
        std::vector<Value> row;
        row.reserve(raw.size());
        for (const auto& f : raw) row.push_back(canonicalize(f));
        d.rows.push_back(std::move(row));
    }
    if (d.rows.empty())
        std::cerr << "warning: dictionary '" << id << "' (" << path << ") has no rows\n";
    add(std::move(d));
}

void DictRegistry::add(ExtDict dict) {
    std::string id = dict.id;
    if (!dicts_.emplace(id, std::move(dict)).second)
        throw LoadError("dictionary id '" + id + "' already registered");
}

const ExtDict& DictRegistry::get(const std::string& id) const {
    auto it = dicts_.find(id);
    if (it == dicts_.end()) throw ContractError("unknown dictionary '" + id + "'");
    return it->second;
}

std::vector<MatchedFact> match_dependencies(const Dataset& dataset, const DictRegistry& dicts,
                                            const std::vector<MatchingDependency>& mds,
                                            double sim_threshold) {
    std::vector<MatchedFact> facts;
    std::set<std::tuple<int32_t, int32_t, std::string, std::string>> seen;

    for (const auto& md : mds) {
        const ExtDict& dict = dicts.get(md.dict_id);
        int target_col = dataset.attribute_index(md.target_attr);
        int source_col = dict.find_attribute(md.source_dict_attr);
        if (source_col < 0)
            throw ContractError("dictionary '" + md.dict_id + "' lacks attribute '" +
                                md.source_dict_attr + "'");
        struct BoundCond {
            int data_col;
            int dict_col;
            MatchOp op;
        };
        std::vector<BoundCond> conds;
        for (const auto& c : md.conditions) {
            int dcol = dataset.attribute_index(c.attr);
            int kcol = dict.find_attribute(c.dict_attr);
            if (kcol < 0)
                throw ContractError("dictionary '" + md.dict_id + "' lacks attribute '" +
                                    c.dict_attr + "'");
            conds.push_back({dcol, kcol, c.op});
        }

        for (int r = 0; r < static_cast<int>(dataset.tuple_count()); ++r) {
            for (const auto& row : dict.rows) {
                bool ok = true;
                for (const auto& c : conds) {
                    const Value& dv = dataset.value(r, c.data_col);
                    const Value& kv = row[c.dict_col];
                    if (!dv || !kv) {
                        ok = false;
                        break;
                    }
                    if (c.op == MatchOp::Exact ? (*dv != *kv)
                                               : (similarity(*dv, *kv) < sim_threshold)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                const Value& suggestion = row[source_col];
                if (!suggestion) continue;
                Cell cell{r, target_col};
                if (seen.emplace(cell.row, cell.col, *suggestion, md.dict_id).second)
                    facts.push_back({cell, *suggestion, md.dict_id});
            }
        }
    }
    return facts;
}

void extend_domains(DomainMap& domains, const std::vector<MatchedFact>& facts,
                    const Dataset& dataset, const CoocTable& table) {
    std::set<Cell> touched;
    for (const auto& f : facts) {
        auto it = domains.find(f.cell);
        if (it == domains.end()) continue;  // evidence cell: nothing to extend
        auto& dom = it->second;
        if (dom.index_of(f.value) < 0) {
            dom.candidates.push_back(f.value);
            touched.insert(f.cell);
        }
    }
    for (const Cell& c : touched) {
        auto& dom = domains.at(c);
        std::sort(dom.candidates.begin(), dom.candidates.end(),
                  [&](const std::string& a, const std::string& b) {
                      double pa = max_cooc_prob(dataset, table, c, a);
                      double pb = max_cooc_prob(dataset, table, c, b);
                      if (pa != pb) return pa > pb;
                      return a < b;
                  });
        const Value& init = dataset.value(c.row, c.col);
        dom.initial_index = init ? dom.index_of(*init) : -1;
    }
}

}  // namespace holorepair
