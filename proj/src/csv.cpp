#include "holorepair/csv.hpp"

#include <fstream>
#include <sstream>

#include "holorepair/errors.hpp"

namespace holorepair::csv {

namespace {

// One record per call; advances pos past the trailing newline.
std::vector<std::string> parse_record(const std::string& text, std::size_t& pos,
                                      const std::string& origin, std::size_t record_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    const std::size_t n = text.size();
    while (pos < n) {
        char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < n && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    quoted = false;
                    ++pos;
                }
            } else {
                field.push_back(c);
                ++pos;
            }
            continue;
        }
        if (c == '"') {
            if (!field.empty())
                throw LoadError(origin + ": stray quote inside unquoted field, record " +
                                std::to_string(record_no));
            quoted = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++pos;
        } else if (c == '\r' && pos + 1 < n && text[pos + 1] == '\n') {
            pos += 2;
            fields.push_back(std::move(field));
            return fields;
        } else if (c == '\n') {
            ++pos;
            fields.push_back(std::move(field));
            return fields;
        } else {
            field.push_back(c);
            ++pos;
        }
    }
    if (quoted)
        throw LoadError(origin + ": unterminated quoted field, record " +
                        std::to_string(record_no));
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

Table read_string(const std::string& text, const std::string& origin) {
    Table t;
    std::size_t pos = 0;
    if (text.empty()) throw LoadError(origin + ": empty file, header row required");
    t.header = parse_record(text, pos, origin, 0);
    std::size_t record_no = 1;
    while (pos < text.size()) {
        // A trailing newline after the last record is not an empty row.
        if (pos + 1 == text.size() && text[pos] == '\n') break;
        auto row = parse_record(text, pos, origin, record_no);
        if (row.size() != t.header.size())
            throw LoadError(origin + ": row " + std::to_string(record_no) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(t.header.size()));
        t.rows.push_back(std::move(row));
        ++record_no;
    }
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_string(buf.str(), path);
}

static void write_field(std::string& out, const std::string& f) {
    bool need_quotes = f.find_first_of(",\"\r\n") != std::string::npos;
    if (!need_quotes) {
        out += f;
        return;
    }
    out.push_back('"');
    for (char c : f) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

std::string write_string(const Table& table) {
    std::string out;
    auto write_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            write_field(out, row[i]);
        }
        out.push_back('\n');
    };
    write_row(table.header);
    for (const auto& r : table.rows) write_row(r);
    return out;
}

void write_file(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << write_string(table);
    if (!out) throw Error(path + ": write failed");
}

}  // namespace holorepair::csv
