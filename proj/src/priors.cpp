#include "speckle/priors.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "speckle/io.hpp"

namespace speckle {
namespace {

RealGrid clamp_nonnegative(const RealGrid& s, std::optional<double> upper) {
    RealGrid out = s;
    for (double& v : out) {
        if (std::isnan(v)) fail(ErrorKind::invalid_argument, "prior input contains NaN");
        v = std::max(v, 0.0);
        if (upper) v = std::min(v, *upper);
    }
    return out;
}

std::string substitute(std::string cmd, const std::string& key, const std::string& value) {
    for (std::size_t pos = cmd.find(key); pos != std::string::npos;
         pos = cmd.find(key, pos + value.size()))
        cmd.replace(pos, key.size(), value);
    return cmd;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

/// Runs `sh -c cmd` in its own process group; kills the group on timeout.
void run_command(const std::string& cmd, double timeout_s) {
    const pid_t pid = fork();
    if (pid < 0) fail(ErrorKind::external_denoiser, "fork failed");
    if (pid == 0) {
        setpgid(0, 0);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    int status = 0;
    for (;;) {
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) fail(ErrorKind::external_denoiser, "waitpid failed");
        if (std::chrono::steady_clock::now() > deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            fail(ErrorKind::external_denoiser, "external denoiser timed out");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        fail(ErrorKind::external_denoiser,
             "external denoiser exited with status " +
                 std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
}

RealGrid run_external(const PriorOp& prior, const RealGrid& input) {
    const fs::path dir = fs::temp_directory_path() /
                         ("speckle-denoise-" + std::to_string(getpid()) + "-" +
                          std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir);
    struct Cleanup {
        fs::path dir;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{dir};

    const fs::path in = dir / "in.raw";
    const fs::path out = dir / "out.raw";
    write_raw(in, input, kDisplayPeak);
    std::string cmd = substitute(prior.external_command, "{in}", shell_quote(in.string()));
    cmd = substitute(cmd, "{out}", shell_quote(out.string()));
    run_command(cmd, prior.external_timeout_s);

    if (!fs::exists(out)) fail(ErrorKind::external_denoiser, "external denoiser wrote no output");
    RawImage result;
    try {
        result = read_raw(out, input.height(), input.width());
    } catch (const Error& e) {
        fail(ErrorKind::external_denoiser, std::string("bad denoiser output: ") + e.what());
    }
    // Sidecar-less output is taken to be on the input's scale.
    const double rescale = fs::exists(sidecar_path(out)) ? result.scale / kDisplayPeak : 1.0;
    for (double& v : result.values.values()) {
        if (!std::isfinite(v)) fail(ErrorKind::external_denoiser, "denoiser output is not finite");
        v *= rescale;
    }
    return result.values;
}

}  // namespace

PriorOp PriorOp::median(int window) {
    PriorOp p;
    p.kind = PriorKind::median;
    p.median_window = window;
    return p;
}

PriorOp PriorOp::tv(double lambda, int iterations) {
    PriorOp p;
    p.kind = PriorKind::tv;
    p.tv_lambda = lambda;
    p.tv_iterations = iterations;
    return p;
}

PriorOp PriorOp::external(std::string command, double timeout_s) {
    PriorOp p;
    p.kind = PriorKind::external;
    p.external_command = std::move(command);
    p.external_timeout_s = timeout_s;
    return p;
}

void PriorOp::validate() const {
    if (upper && !(*upper > 0.0)) fail(ErrorKind::invalid_argument, "upper clamp must be > 0");
    switch (kind) {
        case PriorKind::clamp: break;
        case PriorKind::median:
            if (median_window < 1 || median_window % 2 == 0)
                fail(ErrorKind::invalid_argument, "median window must be odd and >= 1");
            break;
        case PriorKind::tv:
            if (!(tv_lambda >= 0.0) || tv_iterations < 1)
                fail(ErrorKind::invalid_argument, "tv needs lambda >= 0 and iterations >= 1");
            break;
        case PriorKind::external:
            if (external_command.empty())
                fail(ErrorKind::invalid_argument, "external prior needs a command");
            if (!(external_timeout_s > 0.0))
                fail(ErrorKind::invalid_argument, "external timeout must be > 0");
            break;
    }
}

std::string PriorOp::describe() const {
    switch (kind) {
        case PriorKind::clamp: return "clamp";
        case PriorKind::median: return "median:" + std::to_string(median_window);
        case PriorKind::tv: {
            std::ostringstream s;
            s << "tv:" << tv_lambda;
            return s.str();
        }
        case PriorKind::external: return "external:" + external_command;
    }
    return "clamp";
}

PriorOp parse_prior(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    PriorOp p;
    try {
        if (head == "clamp" && arg.empty()) {
            p = PriorOp::clamp();
        } else if (head == "median") {
            p = PriorOp::median(arg.empty() ? 3 : std::stoi(arg));
        } else if (head == "tv") {
            p = PriorOp::tv(arg.empty() ? 2.0 : std::stod(arg));
        } else if (head == "external" && !arg.empty()) {
            p = PriorOp::external(arg);
        } else {
            fail(ErrorKind::invalid_argument, "unknown prior '" + text + "'");
        }
    } catch (const std::logic_error&) {
        fail(ErrorKind::invalid_argument, "bad prior parameter in '" + text + "'");
    }
    p.validate();
    return p;
}

RealGrid tv_prox(const RealGrid& f, double lambda, int iterations) {
    const int H = f.height(), W = f.width();
    if (lambda == 0.0) return f;
    constexpr double tau = 0.125;
    RealGrid px(H, W), py(H, W), div(H, W), gx(H, W), gy(H, W);

    auto divergence = [&]() {
        for (int h = 0; h < H; ++h) {
            for (int w = 0; w < W; ++w) {
                double d = 0.0;
                if (w < W - 1) d += px(h, w);
                if (w > 0) d -= px(h, w - 1);
                if (h < H - 1) d += py(h, w);
                if (h > 0) d -= py(h - 1, w);
                div(h, w) = d;
            }
        }
    };

    for (int it = 0; it < iterations; ++it) {
        divergence();
        for (std::size_t i = 0; i < f.size(); ++i) div[i] -= f[i] / lambda;
        for (int h = 0; h < H; ++h) {
            for (int w = 0; w < W; ++w) {
                gx(h, w) = w < W - 1 ? div(h, w + 1) - div(h, w) : 0.0;
                gy(h, w) = h < H - 1 ? div(h + 1, w) - div(h, w) : 0.0;
            }
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double denom = 1.0 + tau * std::hypot(gx[i], gy[i]);
            px[i] = (px[i] + tau * gx[i]) / denom;
            py[i] = (py[i] + tau * gy[i]) / denom;
        }
    }
    divergence();
    RealGrid u(H, W);
    for (std::size_t i = 0; i < f.size(); ++i) u[i] = f[i] - lambda * div[i];
    return u;
}

RealGrid median_filter(const RealGrid& f, int window) {
    if (window < 1 || window % 2 == 0)
        fail(ErrorKind::invalid_argument, "median window must be odd and >= 1");
    const int H = f.height(), W = f.width(), r = window / 2;
    RealGrid out(H, W);
    std::vector<double> buf(static_cast<std::size_t>(window) * window);
    for (int h = 0; h < H; ++h) {
        for (int w = 0; w < W; ++w) {
            std::size_t k = 0;
            for (int dh = -r; dh <= r; ++dh)
                for (int dw = -r; dw <= r; ++dw)
                    buf[k++] = f(std::clamp(h + dh, 0, H - 1), std::clamp(w + dw, 0, W - 1));
            auto mid = buf.begin() + static_cast<std::ptrdiff_t>(buf.size() / 2);
            std::nth_element(buf.begin(), mid, buf.end());
            out(h, w) = *mid;
        }
    }
    return out;
}

ReflectivityImage apply_prior(const PriorOp& prior, const RealGrid& s) {
    prior.validate();
    const RealGrid clamped = clamp_nonnegative(s, prior.upper);
    switch (prior.kind) {
        case PriorKind::clamp: return ReflectivityImage(clamped);
        case PriorKind::median:
            return ReflectivityImage(
                clamp_nonnegative(median_filter(clamped, prior.median_window), prior.upper));
        case PriorKind::tv:
            return ReflectivityImage(clamp_nonnegative(
                tv_prox(clamped, prior.tv_lambda / kDisplayPeak, prior.tv_iterations),
                prior.upper));
        case PriorKind::external:
            return ReflectivityImage(clamp_nonnegative(run_external(prior, clamped), prior.upper));
    }
    fail(ErrorKind::invalid_argument, "unknown prior kind");
}

}  // namespace speckle
