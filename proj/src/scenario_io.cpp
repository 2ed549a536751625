#include "peermarket/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace peermarket {

namespace {

constexpr const char* kHeader = "peermarket scenario v1";

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

[[noreturn]] void bad_line(std::size_t lineno, const std::string& why) {
    throw SimError(ErrorCode::MalformedInput,
                   "scenario line " + std::to_string(lineno) + ": " + why);
}

} // namespace

void canonicalize(Scenario& s) {
    std::sort(s.prosumers.begin(), s.prosumers.end());
    s.prosumers.erase(std::unique(s.prosumers.begin(), s.prosumers.end()), s.prosumers.end());
    for (RelationEntry& e : s.relations) {
        if (e.b < e.a)
            std::swap(e.a, e.b);
    }
    std::sort(s.relations.begin(), s.relations.end(), [](const auto& x, const auto& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    std::sort(s.orders.begin(), s.orders.end(), [](const Order& x, const Order& y) {
        return std::tie(x.hour, x.owner) < std::tie(y.hour, y.owner);
    });
}

std::string serialize_scenario(const Scenario& s) {
    Scenario canon = s;
    canonicalize(canon);
    std::string out;
    out += kHeader;
    out += '\n';
    for (ProsumerId p : canon.prosumers)
        out += "prosumer: " + format_prosumer(p) + "\n";
    for (const RelationEntry& e : canon.relations) {
        if (e.rel == Relation::Neutral)
            continue;
        out += "relation: " + format_prosumer(e.a) + " " + format_prosumer(e.b) + " " +
               relation_name(e.rel) + "\n";
    }
    for (const Order& o : canon.orders) {
        out += "order: " + format_prosumer(o.owner) + " " + std::to_string(o.hour) + " " +
               format_energy(o.quantity) + " " + std::to_string(o.limit_price) + " " +
               std::to_string(o.delta_price) + "\n";
    }
    return out;
}

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos)
            line = line.substr(0, pos);
        const auto toks = split_ws(line);
        if (toks.empty())
            continue;
        if (!saw_header) {
            if (line != kHeader)
                bad_line(lineno, "expected header '" + std::string(kHeader) + "'");
            saw_header = true;
            continue;
        }
        if (toks[0] == "prosumer:") {
            if (toks.size() != 2)
                bad_line(lineno, "prosumer line needs one id");
            auto id = parse_prosumer(toks[1]);
            if (!id)
                bad_line(lineno, "bad prosumer id '" + toks[1] + "'");
            s.prosumers.push_back(*id);
        } else if (toks[0] == "relation:") {
            if (toks.size() != 4)
                bad_line(lineno, "relation line needs two ids and a kind");
            auto a = parse_prosumer(toks[1]);
            auto b = parse_prosumer(toks[2]);
            auto r = parse_relation(toks[3]);
            if (!a || !b || !r)
                bad_line(lineno, "bad relation entry");
            s.relations.push_back({*a, *b, *r});
        } else if (toks[0] == "order:") {
            if (toks.size() != 6)
                bad_line(lineno, "order line needs owner hour qty price delta");
            auto owner = parse_prosumer(toks[1]);
            if (!owner)
                bad_line(lineno, "bad order owner '" + toks[1] + "'");
            int hour = 0;
            try {
                hour = std::stoi(toks[2]);
            } catch (...) {
                bad_line(lineno, "bad hour");
            }
            if (hour < 0 || hour > 23)
                bad_line(lineno, "hour out of range");
            auto qty = parse_energy(toks[3]);
            if (!qty || qty->milli < 0)
                bad_line(lineno, "bad quantity '" + toks[3] + "'");
            Price price = 0;
            Price delta = 0;
            try {
                price = std::stoll(toks[4]);
                delta = std::stoll(toks[5]);
            } catch (...) {
                bad_line(lineno, "bad price fields");
            }
            if (price < 0 || delta < 0)
                bad_line(lineno, "negative price fields");
            s.orders.push_back({*owner, hour, *qty, price, delta});
        } else {
            bad_line(lineno, "unknown directive '" + toks[0] + "'");
        }
    }
    if (!saw_header)
        throw SimError(ErrorCode::MalformedInput, "scenario file is empty");
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SimError(ErrorCode::StorageFailure, "cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void save_scenario_file(const Scenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw SimError(ErrorCode::StorageFailure, "cannot write scenario file " + path);
    out << serialize_scenario(s);
    if (!out.flush())
        throw SimError(ErrorCode::StorageFailure, "short write to " + path);
}

} // namespace peermarket
