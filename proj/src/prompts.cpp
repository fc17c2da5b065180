#include "rtlforge/prompts.hpp"

namespace rtlforge::prompts {

namespace {

const char* kProblemTemplate = R"PROMPT(Your goal is to create a high-quality Verilog problem.

- Guidelines for designing the problem description:
  1. This should be completely self-contained, providing all the contextual information one needs to understand and solve the problem.
  2. Assume common Verilog knowledge, but ensure that any specific context, variables, or code snippets pertinent to this problem are explicitly included.
  3. Do not include the code snippet in the problem.
  4. The problem should be designed for the programmer to solve with one Verilog module. Here is an example:

- Guidelines for the problem description format:

  The problem description section should be enclosed within <PROBLEM> </PROBLEM> tags.
  Below shows an example:

Output:
<PROBLEM>
Build a counter that counts from 0 to 999, inclusive, with a period of 1000 cycles.
The reset input is active high synchronous, and should reset the counter to 0.
Solve the problem by completing the following module.
</PROBLEM>

- Now, please gain inspiration from the following code snippet to create a high-quality Verilog problem.

- Please increase the difficulty of the given programming test question a bit. You can increase the difficulty using, but not limited to, the following methods:
  1. Your new problem should not be directly solved by the original code snippet.
  2. You can also change the bit-width requirement, how to reset internal signals (if applicable), and whether the solution needs a clock signal (combinatorial versus sequential logic). If you do have a reset method that is synchronous to a clock, make sure to add the clock signal to the problem module input.
  3. Add new constraints and requirements to the original problem, adding approximately 10 additional words.
  4. Replace a commonly used requirement in the programming task with a less common and more specific one.
  5. If the original problem can be solved with only a few logical steps, please add more reasoning steps.

Code snippet for inspiration:
{code}

Output:
)PROMPT";

const char* kSolutionTemplate = R"PROMPT(Your goal is to solve a Verilog problem by completing one Verilog module.

- Guidelines for writing the solution (Verilog module) and formatting:
  1. The module should be completely self-contained, fulfilling all the requirements needed to solve the problem.
  2. Ensure the correctness of the syntax and functionality.
  3. The solution must be valid Verilog code.
  4. Do not include or import outside the module and define everything inside the module.
  5. The solution section should be enclosed within <answer> </answer> tags.

- Below shows an example:

Problem description:
Build a counter that counts from 0 to 999, inclusive, with a period of 1000 cycles.
...

Output:

<think>
Okay, so I need to design a counter that goes from 0 to 999 and then repeats. The module is called top_module and has clk, reset, and output q which is a 10-bit register.
...

Yes. The code should handle all that.
</think>

<answer>
module top_module(
    input clk,
    input reset,
    output reg [9:0] q);

    always @(posedge clk) begin
        if (reset) begin
            q <= 10'd0; // Synchronous reset to 0
        end else begin
            if (q == 10'd999) begin // Check if reached 999
                q <= 10'd0;
            end else begin
                q <= q + 10'd1; // Increment otherwise
            end
        end
    end

endmodule
</answer>

- Now, please solve the following Verilog problem. I will also attach a reference code snippet which was used as an inspiration to generate the problem. The provided code may not directly solve the problem, so use it only as a reference.

Reference code:
{reference_code}

Problem description:
{problem}

Output:
)PROMPT";

const char* kRulegenTemplate = R"PROMPT(You are an expert in Verilog hardware description language, focusing on analyzing code generation challenges and potential pitfalls.

I will provide you with a markdown file containing a Verilog code generation benchmark, which includes:
- The original prompt/problem statement
- Additional context and information

# Your Task
Analyze the Verilog code generation task in depth and provide:

1. Potential Pitfalls Analysis: Identify the key challenges and tricky aspects of this problem that could lead to incorrect code generation. This could include:
   - Complex syntax requirements
   - Subtle logic implementation details
   - Problem interpretation challenges
   - Timing-sensitive operations
   - Signal width considerations
   - Tricky Verilog construct usage

2. Critical Implementation Areas: Point out the specific aspects of the problem that are most prone to errors, with clear explanations of what makes these areas challenging.

3. Problem Complexity Assessment: Analyze the inherent complexity of the problem and identify areas where careful attention to detail is required for correct implementation.

4. General Verilog Coding Rules: Based on the potential challenges identified, formulate concise, general Verilog coding rules that would help prevent common mistakes. These rules should:
   - Be widely applicable to Verilog coding, not just this specific example
   - Focus on best practices for correctness, not just style
   - Be clear and actionable
   - Address the potential pitfalls you identified
   - Focus only on rules that help generate syntactically and functionally correct RTL code

Format your response as follows:

Potential Pitfalls Analysis
[Your detailed analysis of challenging aspects that could lead to incorrect code generation]

Critical Implementation Areas
[Your identification of error-prone areas in the implementation]

Problem Complexity Assessment
[Your analysis of the problem's inherent complexity and attention-requiring areas]

Verilog Coding Rules
[List up to 3 critical Verilog coding rules here, focusing only on correct RTL generation]

Here is the markdown file containing the Verilog code generation benchmark:

{md_content}
)PROMPT";

}  // namespace

const std::string& problem_template() {
    static const std::string t = kProblemTemplate;
    return t;
}

const std::string& solution_template() {
    static const std::string t = kSolutionTemplate;
    return t;
}

const std::string& rulegen_template() {
    static const std::string t = kRulegenTemplate;
    return t;
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& slots) {
    for (const auto& [name, value] : slots) {
        (void)value;
        if (tmpl.find("{" + name + "}") == std::string_view::npos)
            throw TemplateSlotMissing(name);
    }
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        char c = tmpl[i];
        if (c == '{') {
            auto close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                std::string name(tmpl.substr(i + 1, close - i - 1));
                auto it = slots.find(name);
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += c;
        ++i;
    }
    return out;
}

}  // namespace rtlforge::prompts
