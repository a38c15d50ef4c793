// io.hpp — CSV/JSON serialization of tabular results and parameter handling.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "usc/model.hpp"

namespace usc::io {

enum class OutputFormat { Csv, Json };

struct Table {
    std::vector<std::string> comments;  // provenance lines, written with a '#' prefix
    std::vector<std::string> columns;   // header names, unit-annotated
    std::vector<std::vector<double>> rows;
};

// 17 significant digits: exact text→double round trip.
std::string format_double(double value);

void write_csv(const std::string& path, const Table& table);
Table read_csv(const std::string& path);

void write_json(const std::string& path, const Table& table);
Table read_json(const std::string& path);

void write_table(const std::string& path, const Table& table, OutputFormat format);

nlohmann::json params_to_json(const model::SystemParams& p);
model::SystemParams params_from_json(const nlohmann::json& j,
                                     const model::SystemParams& base = {});

}  // namespace usc::io
