#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "holorepair/text.hpp"

namespace holorepair::csv {
struct Table;
}

namespace holorepair {

/// Reference to one cell by position. Rows and columns index into the
/// owning Dataset's tuple and attribute lists.
struct Cell {
    int32_t row = -1;
    int32_t col = -1;
    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct CellHash {
    std::size_t operator()(const Cell& c) const {
        return std::hash<int64_t>()((static_cast<int64_t>(c.row) << 32) |
                                    static_cast<uint32_t>(c.col));
    }
};

struct LoadOptions {
    std::string tid_column;         // empty: tuple-ids are 1-based row numbers
    std::string provenance_column;  // empty: no provenance
};

/// Immutable table of tuples x attributes. Loaded once; repairs produce a
/// new table via Dataset::with_repairs. Safe for concurrent reads.
class Dataset {
public:
    Dataset() = default;

    static Dataset load_csv(const std::string& path, const LoadOptions& opts = {});
    static Dataset from_csv_text(const std::string& text, const LoadOptions& opts = {},
                                 const std::string& origin = "<string>");

    std::size_t tuple_count() const { return tuple_ids_.size(); }
    std::size_t attribute_count() const { return attributes_.size(); }
    std::size_t cell_count() const { return tuple_count() * attribute_count(); }

    const std::vector<std::string>& attributes() const { return attributes_; }
    const std::vector<std::string>& tuple_ids() const { return tuple_ids_; }

    int attribute_index(const std::string& name) const;  // throws on unknown name
    int find_attribute(const std::string& name) const;   // -1 when absent
    int find_tuple(const std::string& tid) const;        // -1 when absent

    const std::string& tuple_id(int row) const { return tuple_ids_[row]; }
    const std::string& attribute(int col) const { return attributes_[col]; }

    const Value& value(int row, int col) const { return rows_[row][col]; }
    const Value& value(const Cell& c) const { return rows_[c.row][c.col]; }

    bool has_provenance() const { return !provenance_.empty(); }
    const Value& provenance(int row) const { return provenance_[row]; }

    /// Distinct non-NULL values observed in an attribute.
    std::set<std::string> active_domain(const std::string& attribute) const;
    const std::vector<std::string>& active_domain(int col) const;

    /// Copy with the given cells replaced. Values are canonicalized.
    Dataset with_repairs(const std::vector<std::pair<Cell, Value>>& updates) const;

    /// Serialize in the original column layout (tid / provenance columns are
    /// re-emitted in place). Round-trips byte-identically modulo
    /// canonicalization.
    std::string to_csv() const;
    void write_csv(const std::string& path) const;

private:
    static Dataset from_table(csv::Table raw, const LoadOptions& opts,
                              const std::string& origin);
    void index_and_check(const std::string& origin);
    void rebuild_domains();

    std::vector<std::string> attributes_;
    std::vector<std::string> tuple_ids_;
    std::vector<std::vector<Value>> rows_;
    std::vector<Value> provenance_;

    std::unordered_map<std::string, int> attr_index_;
    std::unordered_map<std::string, int> tuple_index_;
    std::vector<std::vector<std::string>> domains_;  // per column, built at load

    // Original header layout: for each source column, the attribute index,
    // or -1 for the tid column, -2 for the provenance column.
    std::vector<std::string> source_header_;
    std::vector<int> source_roles_;
};

}  // namespace holorepair
