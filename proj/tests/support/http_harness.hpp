#pragma once

// In-process server plus the click/grow/add wire scenario, shared by unit and acceptance tests.

#include "support/fixtures.hpp"

#include <pats/http_api.hpp>

#include <optional>
#include <string>
#include <thread>

namespace pats::support {

class TestServer {
public:
    explicit TestServer(ServiceOptions opt = {}) : service(std::move(opt))
    {
        install_routes(server, service);
        port = server.bind_to_any_port("127.0.0.1");
        if (port <= 0) throw std::runtime_error("could not bind a local port");
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer()
    {
        server.stop();
        thread_.join();
    }
    TestServer(const TestServer&) = delete;
    TestServer& operator=(const TestServer&) = delete;

    httplib::Client client() const
    {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(60, 0);
        return c;
    }

    SelectionService service;
    httplib::Server server;
    int port = 0;

private:
    std::thread thread_;
};

inline std::string xy(Pixel p)
{
    return nlohmann::json{{"x", p.x}, {"y", p.y}}.dump();
}

/// Most salient node at pixel p, found by walking the ancestry; deepest wins ties.
inline NodeId expected_node_at(const Segmentation& seg, Pixel p)
{
    const std::size_t idx = static_cast<std::size_t>(p.y) * static_cast<std::size_t>(seg.width()) + p.x;
    const PathMax pm = brute_force_path_max(seg.tree, seg.saliency.s_hier);
    return pm.node[seg.tree.leaf_of_pixel[idx]];
}

struct WireOutcome {
    bool ok = false;
    std::string message;
};

/// POST /sessions, /click, /grow, /add then GET /mask.png, checked against a local recomputation.
inline WireOutcome run_wire_scenario(TestServer& srv, const ColorImage& img, Pixel click, Pixel part)
{
    using nlohmann::json;
    auto cli = srv.client();
    const std::string png = encode_png(img);

    httplib::MultipartFormDataItems items{{"image", png, "scene.png", "image/png"}};
    auto res = cli.Post("/sessions", items);
    if (!res || res->status != 200) return {false, "POST /sessions failed"};
    const json opened = json::parse(res->body);
    const std::string sid = opened.at("session_id");
    if (opened.at("width") != img.width() || opened.at("height") != img.height()) {
        return {false, "session reports wrong dimensions"};
    }
    if (opened.at("image_id") != content_id(png)) return {false, "image_id is not the content hash"};
    const std::string base = "/sessions/" + sid;

    // Local expectation from an independent segmentation of the same decoded bytes.
    const Segmentation seg = segment(decode_color_image(png));
    const NodeId want_click = expected_node_at(seg, click);
    const NodeId parent = seg.tree.nodes[want_click].parent;
    const NodeId want_active = parent == kNoNode ? want_click : parent;
    const NodeId want_part = expected_node_at(seg, part);

    res = cli.Post(base + "/click", xy(click), "application/json");
    if (!res || res->status != 200) return {false, "POST /click failed"};
    if (json::parse(res->body).at("node_id") != want_click) return {false, "click selected a different node"};

    res = cli.Post(base + "/grow", "", "application/json");
    if (!res || res->status != 200) return {false, "POST /grow failed"};
    if (json::parse(res->body).at("node_id") != want_active) return {false, "grow moved to a different node"};

    res = cli.Post(base + "/add", xy(part), "application/json");
    if (!res || res->status != 200) return {false, "POST /add failed"};
    const json added = json::parse(res->body);
    if (added.at("node_id") != want_part) return {false, "add chose a different node"};

    res = cli.Get(base + "/mask.png");
    if (!res || res->status != 200) return {false, "GET /mask.png failed"};
    if (res->get_header_value("Content-Type") != "image/png") return {false, "mask is not served as PNG"};
    const GrayImage got = decode_gray_image(res->body);
    if (got.width() != img.width() || got.height() != img.height()) return {false, "mask has wrong size"};

    std::size_t fg = 0;
    for (std::size_t p = 0; p < got.size(); ++p) {
        const bool in = pixel_in_node(seg.tree, p, want_active) || pixel_in_node(seg.tree, p, want_part);
        fg += in;
        if (got[p] != (in ? 255 : 0)) return {false, "mask pixel " + std::to_string(p) + " differs"};
    }
    if (added.at("mask_pixels") != fg) return {false, "reported mask_pixels differs"};
    return {true, std::to_string(fg) + " mask pixels match"};
}

} // namespace pats::support
