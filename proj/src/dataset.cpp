#include "holorepair/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "holorepair/csv.hpp"
#include "holorepair/errors.hpp"

namespace holorepair {

Dataset Dataset::from_csv_text(const std::string& text, const LoadOptions& opts,
                               const std::string& origin) {
    return from_table(csv::read_string(text, origin), opts, origin);
}

Dataset Dataset::load_csv(const std::string& path, const LoadOptions& opts) {
    return from_table(csv::read_file(path), opts, path);
}

Dataset Dataset::from_table(csv::Table raw, const LoadOptions& opts, const std::string& origin) {
    int tid_col = -1, src_col = -1;
    Dataset ds;
    ds.source_header_ = raw.header;
    for (std::size_t i = 0; i < raw.header.size(); ++i) {
        const std::string& name = raw.header[i];
        if (!opts.tid_column.empty() && name == opts.tid_column) {
            if (tid_col >= 0) throw LoadError(origin + ": duplicate tid column " + name);
            tid_col = static_cast<int>(i);
            ds.source_roles_.push_back(-1);
        } else if (!opts.provenance_column.empty() && name == opts.provenance_column) {
            if (src_col >= 0) throw LoadError(origin + ": duplicate provenance column " + name);
            src_col = static_cast<int>(i);
            ds.source_roles_.push_back(-2);
        } else {
            ds.source_roles_.push_back(static_cast<int>(ds.attributes_.size()));
            ds.attributes_.push_back(name);
        }
    }
    if (!opts.tid_column.empty() && tid_col < 0)
        throw LoadError(origin + ": tid column '" + opts.tid_column + "' not in header");
    if (!opts.provenance_column.empty() && src_col < 0)
        throw LoadError(origin + ": provenance column '" + opts.provenance_column +
                        "' not in header");

    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const auto& src = raw.rows[r];
        std::vector<Value> row(ds.attributes_.size());
        for (std::size_t i = 0; i < src.size(); ++i) {
            int role = ds.source_roles_[i];
            if (role >= 0) row[role] = canonicalize(src[i]);
        }
        if (tid_col >= 0) {
            Value tid = canonicalize(src[tid_col]);
            if (!tid)
                throw LoadError(origin + ": row " + std::to_string(r + 1) + " has empty tuple-id");
            ds.tuple_ids_.push_back(*tid);
        } else {
            ds.tuple_ids_.push_back(std::to_string(r + 1));
        }
        if (src_col >= 0)
            ds.provenance_.push_back(canonicalize(src[src_col]));
        ds.rows_.push_back(std::move(row));
    }
    ds.index_and_check(origin);
    return ds;
}

void Dataset::index_and_check(const std::string& origin) {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].empty())
            throw LoadError(origin + ": empty attribute name in header");
        if (!attr_index_.emplace(attributes_[i], static_cast<int>(i)).second)
            throw LoadError(origin + ": duplicate header '" + attributes_[i] + "'");
    }
    for (std::size_t r = 0; r < tuple_ids_.size(); ++r) {
        if (!tuple_index_.emplace(tuple_ids_[r], static_cast<int>(r)).second)
            throw LoadError(origin + ": duplicate tuple-id '" + tuple_ids_[r] + "' at row " +
                            std::to_string(r + 1));
    }
    rebuild_domains();
}

void Dataset::rebuild_domains() {
    domains_.assign(attributes_.size(), {});
    for (std::size_t col = 0; col < attributes_.size(); ++col) {
        std::set<std::string> seen;
        for (const auto& row : rows_)
            if (row[col]) seen.insert(*row[col]);
        domains_[col].assign(seen.begin(), seen.end());
    }
}

int Dataset::attribute_index(const std::string& name) const {
    auto it = attr_index_.find(name);
    if (it == attr_index_.end()) throw ContractError("unknown attribute '" + name + "'");
    return it->second;
}

int Dataset::find_attribute(const std::string& name) const {
    auto it = attr_index_.find(name);
    return it == attr_index_.end() ? -1 : it->second;
}

int Dataset::find_tuple(const std::string& tid) const {
    auto it = tuple_index_.find(tid);
    return it == tuple_index_.end() ? -1 : it->second;
}

std::set<std::string> Dataset::active_domain(const std::string& attribute) const {
    int col = attribute_index(attribute);
    const auto& vals = active_domain(col);
    return std::set<std::string>(vals.begin(), vals.end());
}

const std::vector<std::string>& Dataset::active_domain(int col) const {
    return domains_[col];
}

Dataset Dataset::with_repairs(const std::vector<std::pair<Cell, Value>>& updates) const {
    Dataset out = *this;
    for (const auto& [cell, v] : updates) {
        if (cell.row < 0 || cell.row >= static_cast<int>(tuple_count()) || cell.col < 0 ||
            cell.col >= static_cast<int>(attribute_count()))
            throw ContractError("repair references cell outside the dataset");
        out.rows_[cell.row][cell.col] = v ? canonicalize(*v) : v;
    }
    out.rebuild_domains();
    return out;
}

std::string Dataset::to_csv() const {
    csv::Table t;
    t.header = source_header_;
    if (t.header.empty()) t.header = attributes_;  // datasets built without a source layout
    t.rows.reserve(tuple_count());
    for (std::size_t r = 0; r < tuple_count(); ++r) {
        std::vector<std::string> row;
        row.reserve(t.header.size());
        if (source_header_.empty()) {
            for (const auto& v : rows_[r]) row.push_back(v.value_or(""));
        } else {
            for (std::size_t i = 0; i < source_roles_.size(); ++i) {
                int role = source_roles_[i];
                if (role == -1)
                    row.push_back(tuple_ids_[r]);
                else if (role == -2)
                    row.push_back(provenance_[r].value_or(""));
                else
                    row.push_back(rows_[r][role].value_or(""));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return csv::write_string(t);
}

void Dataset::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << to_csv();
    if (!out) throw Error(path + ": write failed");
}

}  // namespace holorepair
